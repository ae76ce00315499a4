#pragma once

#include <array>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace effortnn {

/// One project row. Text fields are empty when missing; numeric fields are
/// nullopt when the cell was blank or unparseable.
struct ProjectRecord {
    std::string project_id;
    std::string data_quality;
    std::string count_approach;
    std::optional<double> afp;                // adjusted function points
    std::optional<double> normalised_effort;  // person-hours
    std::string development_type;
    std::string development_platform;
    std::string language_type;
    std::string resource_level;
    std::optional<int> project_year;
    std::map<std::string, std::string> extras;

    /// Effort per function point; nullopt unless both values are present and afp > 0.
    std::optional<double> productivity() const;

    bool operator==(const ProjectRecord&) const = default;
};

inline constexpr std::array<std::string_view, 10> kRecordFields = {
    "project_id",       "data_quality",         "count_approach", "afp",
    "normalised_effort", "development_type",    "development_platform",
    "language_type",    "resource_level",       "project_year"};

/// Categorical model inputs, in encoding order. Size (afp) always precedes them.
inline constexpr std::array<std::string_view, 3> kCategoricalFields = {
    "development_platform", "language_type", "resource_level"};

bool is_record_field(std::string_view name);

/// Text view of a field (numbers rendered with format_double); empty when missing.
std::string field_text(const ProjectRecord& record, std::string_view field);

/// True when the field holds a usable value. Numeric size and effort must
/// also be strictly positive.
bool field_present(const ProjectRecord& record, std::string_view field);

/// Maps record fields to table columns. A column identifier matches a header
/// cell exactly (after trimming); failing that, an identifier made only of
/// uppercase letters is read as a spreadsheet column letter (A = first).
struct ColumnMap {
    std::vector<std::pair<std::string, std::string>> entries;  // field -> column

    /// Each field mapped to a column of the same name, the layout this
    /// library writes.
    static ColumnMap canonical();
};

/// Throws ConfigError for an unknown field name or an unresolvable column,
/// EmptyInputError for an empty input. Unmapped columns go to `extras`.
std::vector<ProjectRecord> parse_project_table(std::string_view raw, const ColumnMap& columns);

std::vector<ProjectRecord> read_project_table(const std::filesystem::path& path,
                                              const ColumnMap& columns);

/// Canonical table text for records; `split_labels`, when given, adds a
/// trailing "split" column.
std::string records_to_csv(std::span<const ProjectRecord> records,
                           std::span<const std::string> split_labels = {});

/// Accept-values of "*" match anything. Matching is case-insensitive on
/// trimmed text.
struct FilterSpec {
    std::set<std::string> accepted_quality{"A", "B"};
    std::string accepted_count_approach = "IFPUG";
    std::string accepted_development_type = "New Development";
    std::vector<std::string> required_fields{"afp",                  "normalised_effort",
                                             "development_type",     "development_platform",
                                             "language_type",        "resource_level"};

    void validate() const;
    static FilterSpec accept_all();
};

struct StepCount {
    std::string step;
    std::size_t count = 0;
    bool operator==(const StepCount&) const = default;
};
using StepTrace = std::vector<StepCount>;

struct FilterResult {
    std::vector<ProjectRecord> records;
    StepTrace trace;
};

/// Steps in order: data_quality, count_approach, attribute_selection,
/// missing_data, development_type. The trace holds the count after each.
FilterResult filter_projects(std::span<const ProjectRecord> records, const FilterSpec& spec);

struct Band {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();  // exclusive

    bool contains(double productivity) const { return productivity >= lower && productivity < upper; }
};

struct Dataset {
    std::string name;
    Band band;
    std::vector<ProjectRecord> records;
};

inline const std::vector<double> kDefaultBandEdges{0.0, 5.0, 10.0, 15.0, 20.0};

/// Half-open bands [e0,e1), [e1,e2), ..., [e_last, inf) named Dataset1..N.
/// Throws DomainError for a record without positive size/effort or with
/// productivity below the first edge.
std::vector<Dataset> band_by_productivity(std::span<const ProjectRecord> records,
                                          std::span<const double> edges = kDefaultBandEdges);

struct Split {
    std::string name;
    std::vector<ProjectRecord> train;
    std::vector<ProjectRecord> test;
    double fraction = 0.7;
};

/// floor(fraction * n + 0.5) rounding, half up.
std::size_t train_size_for(std::size_t n, double fraction);

/// Stable sort by project_year (ties keep input order); the oldest
/// round(fraction * n) records train, the rest test.
Split chronological_split(const Dataset& dataset, double fraction = 0.7);

}  // namespace effortnn
