#include "effortnn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "effortnn/error.hpp"
#include "effortnn/table_io.hpp"

namespace effortnn {

namespace {

std::optional<double> parse_real(std::string_view text) {
    const std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, t.data() + t.size(), value);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<int> parse_year(std::string_view text) {
    const auto v = parse_real(text);
    if (!v || *v != std::floor(*v) || std::abs(*v) > 1e6) return std::nullopt;
    return static_cast<int>(*v);
}

// "A" -> 0, "Z" -> 25, "AA" -> 26 ...
std::optional<std::size_t> spreadsheet_column(std::string_view id) {
    if (id.empty() || id.size() > 3) return std::nullopt;
    std::size_t index = 0;
    for (char c : id) {
        if (c < 'A' || c > 'Z') return std::nullopt;
        index = index * 26 + static_cast<std::size_t>(c - 'A' + 1);
    }
    return index - 1;
}

void assign_field(ProjectRecord& r, std::string_view field, const std::string& cell) {
    if (field == "project_id") r.project_id = trim(cell);
    else if (field == "data_quality") r.data_quality = trim(cell);
    else if (field == "count_approach") r.count_approach = trim(cell);
    else if (field == "afp") r.afp = parse_real(cell);
    else if (field == "normalised_effort") r.normalised_effort = parse_real(cell);
    else if (field == "development_type") r.development_type = trim(cell);
    else if (field == "development_platform") r.development_platform = trim(cell);
    else if (field == "language_type") r.language_type = trim(cell);
    else if (field == "resource_level") r.resource_level = trim(cell);
    else if (field == "project_year") r.project_year = parse_year(cell);
}

bool accepts(std::string_view accepted, std::string_view value) {
    return accepted == "*" || iequals(trim(accepted), trim(value));
}

}  // namespace

std::optional<double> ProjectRecord::productivity() const {
    if (!afp || !normalised_effort || !(*afp > 0.0)) return std::nullopt;
    return *normalised_effort / *afp;
}

bool is_record_field(std::string_view name) {
    return std::find(kRecordFields.begin(), kRecordFields.end(), name) != kRecordFields.end();
}

std::string field_text(const ProjectRecord& r, std::string_view field) {
    if (field == "project_id") return r.project_id;
    if (field == "data_quality") return r.data_quality;
    if (field == "count_approach") return r.count_approach;
    if (field == "afp") return r.afp ? format_double(*r.afp) : std::string{};
    if (field == "normalised_effort")
        return r.normalised_effort ? format_double(*r.normalised_effort) : std::string{};
    if (field == "development_type") return r.development_type;
    if (field == "development_platform") return r.development_platform;
    if (field == "language_type") return r.language_type;
    if (field == "resource_level") return r.resource_level;
    if (field == "project_year") return r.project_year ? std::to_string(*r.project_year) : std::string{};
    const auto it = r.extras.find(std::string(field));
    return it == r.extras.end() ? std::string{} : it->second;
}

bool field_present(const ProjectRecord& r, std::string_view field) {
    if (field == "afp") return r.afp && *r.afp > 0.0;
    if (field == "normalised_effort") return r.normalised_effort && *r.normalised_effort > 0.0;
    if (field == "project_year") return r.project_year.has_value();
    return !trim(field_text(r, field)).empty();
}

ColumnMap ColumnMap::canonical() {
    ColumnMap map;
    for (auto f : kRecordFields) map.entries.emplace_back(std::string(f), std::string(f));
    return map;
}

std::vector<ProjectRecord> parse_project_table(std::string_view raw, const ColumnMap& columns) {
    if (trim(raw).empty()) throw EmptyInputError("project table is empty");
    const Table table = parse_delimited(raw);
    if (table.header.empty()) throw EmptyInputError("project table has no header row");

    std::vector<std::pair<std::string, std::size_t>> resolved;
    std::vector<bool> mapped(table.header.size(), false);
    for (const auto& [field, column] : columns.entries) {
        if (!is_record_field(field)) throw ConfigError("column mapping names unknown field '" + field + "'");
        const std::string id = trim(column);
        std::optional<std::size_t> index;
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (table.header[i] == id) {
                index = i;
                break;
            }
        }
        if (!index) {
            const auto letter = spreadsheet_column(id);
            if (letter && *letter < table.header.size()) index = letter;
        }
        if (!index) {
            throw ConfigError("mapped column '" + column + "' for field '" + field +
                              "' not found in table header");
        }
        mapped[*index] = true;
        resolved.emplace_back(field, *index);
    }

    std::vector<ProjectRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        ProjectRecord r;
        static const std::string kEmpty;
        for (const auto& [field, index] : resolved) {
            assign_field(r, field, index < row.size() ? row[index] : kEmpty);
        }
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (!mapped[i] && i < row.size()) r.extras.emplace(table.header[i], row[i]);
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<ProjectRecord> read_project_table(const std::filesystem::path& path,
                                              const ColumnMap& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open project table '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_project_table(buffer.str(), columns);
}

std::string records_to_csv(std::span<const ProjectRecord> records,
                           std::span<const std::string> split_labels) {
    Table table;
    for (auto f : kRecordFields) table.header.emplace_back(f);
    const bool with_split = !split_labels.empty();
    if (with_split) table.header.emplace_back("split");
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::vector<std::string> row;
        for (auto f : kRecordFields) row.push_back(field_text(records[i], f));
        if (with_split) row.push_back(i < split_labels.size() ? split_labels[i] : std::string{});
        table.rows.push_back(std::move(row));
    }
    return write_delimited(table);
}

void FilterSpec::validate() const {
    if (accepted_quality.empty()) throw ConfigError("FilterSpec: accepted_quality must be nonempty");
    for (const auto& f : required_fields) {
        if (!is_record_field(f)) throw ConfigError("FilterSpec: unknown required field '" + f + "'");
    }
}

FilterSpec FilterSpec::accept_all() {
    FilterSpec spec;
    spec.accepted_quality = {"*"};
    spec.accepted_count_approach = "*";
    spec.accepted_development_type = "*";
    spec.required_fields.clear();
    return spec;
}

FilterResult filter_projects(std::span<const ProjectRecord> records, const FilterSpec& spec) {
    spec.validate();
    FilterResult out;
    std::vector<ProjectRecord> current(records.begin(), records.end());

    auto keep_if = [&](std::string name, auto pred) {
        std::erase_if(current, [&](const ProjectRecord& r) { return !pred(r); });
        out.trace.push_back({std::move(name), current.size()});
    };

    keep_if("data_quality", [&](const ProjectRecord& r) {
        return std::any_of(spec.accepted_quality.begin(), spec.accepted_quality.end(),
                           [&](const std::string& q) { return accepts(q, r.data_quality); });
    });
    keep_if("count_approach",
            [&](const ProjectRecord& r) { return accepts(spec.accepted_count_approach, r.count_approach); });
    // Attribute selection narrows the columns, not the rows.
    keep_if("attribute_selection", [](const ProjectRecord&) { return true; });
    keep_if("missing_data", [&](const ProjectRecord& r) {
        return std::all_of(spec.required_fields.begin(), spec.required_fields.end(),
                           [&](const std::string& f) { return field_present(r, f); });
    });
    keep_if("development_type", [&](const ProjectRecord& r) {
        return accepts(spec.accepted_development_type, r.development_type);
    });

    out.records = std::move(current);
    return out;
}

std::vector<Dataset> band_by_productivity(std::span<const ProjectRecord> records,
                                          std::span<const double> edges) {
    if (edges.empty()) throw DomainError("band_by_productivity: no band edges");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw DomainError("band_by_productivity: edges must ascend");
    }
    std::vector<Dataset> bands;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        Dataset d;
        d.name = "Dataset" + std::to_string(i + 1);
        d.band.lower = edges[i];
        d.band.upper = i + 1 < edges.size() ? edges[i + 1] : std::numeric_limits<double>::infinity();
        bands.push_back(std::move(d));
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const std::string who = r.project_id.empty() ? "row " + std::to_string(i) : "project " + r.project_id;
        if (!field_present(r, "afp")) throw DomainError("band_by_productivity: " + who + " has no positive size");
        if (!field_present(r, "normalised_effort"))
            throw DomainError("band_by_productivity: " + who + " has no positive effort");
        const double p = *r.productivity();
        auto it = std::find_if(bands.begin(), bands.end(), [p](const Dataset& d) { return d.band.contains(p); });
        if (it == bands.end()) {
            throw DomainError("band_by_productivity: " + who + " productivity " + format_double(p) +
                              " lies below the first band edge");
        }
        it->records.push_back(r);
    }
    return bands;
}

std::size_t train_size_for(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

Split chronological_split(const Dataset& dataset, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("chronological_split: fraction must lie in (0,1)");
    const std::size_t n = dataset.records.size();
    if (n < 2) {
        throw TooSmallError("chronological_split: " + dataset.name + " has " + std::to_string(n) +
                            " record(s); at least 2 are required");
    }
    for (const auto& r : dataset.records) {
        if (!r.project_year) {
            throw DomainError("chronological_split: project " + r.project_id + " in " + dataset.name +
                              " has no project year");
        }
    }
    std::vector<ProjectRecord> sorted = dataset.records;
    std::stable_sort(sorted.begin(), sorted.end(), [](const ProjectRecord& a, const ProjectRecord& b) {
        return *a.project_year < *b.project_year;
    });
    const std::size_t n_train = train_size_for(n, fraction);
    Split split;
    split.name = dataset.name;
    split.fraction = fraction;
    split.train.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_train), sorted.end());
    return split;
}

}  // namespace effortnn
