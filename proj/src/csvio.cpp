#include "fairmult/csvio.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "fairmult/errors.hpp"

namespace fairmult {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == nullptr || *end != '\0' || s.empty())
        throw DataError("bad numeric value '" + s + "' in " + what);
    return v;
}

// Two-valued column -> 0/1 codes.  Literal "0"/"1" columns map by value;
// anything else maps by first occurrence (first value -> 0).
struct ColumnCoding {
    std::vector<int> codes;
    std::vector<std::string> value_of;  // raw value per code
    bool by_occurrence = false;
};

ColumnCoding encode_binary_column(const std::vector<std::vector<std::string>>& rows,
                                  std::size_t col, const std::string& name) {
    std::vector<std::string> distinct;
    for (const auto& row : rows) {
        const std::string& v = row[col];
        bool known = false;
        for (const auto& d : distinct) known = known || d == v;
        if (!known) {
            if (distinct.size() == 2)
                throw DataError("column '" + name + "' has more than two values ('" +
                                distinct[0] + "', '" + distinct[1] + "', '" + v +
                                "')");
            distinct.push_back(v);
        }
    }
    ColumnCoding out;
    const bool numeric =
        (distinct.size() == 2 && ((distinct[0] == "0" && distinct[1] == "1") ||
                                  (distinct[0] == "1" && distinct[1] == "0"))) ||
        (distinct.size() == 1 && (distinct[0] == "0" || distinct[0] == "1"));
    if (numeric) {
        out.value_of = {"0", "1"};
    } else {
        out.value_of = distinct;
        out.by_occurrence = true;
    }
    out.codes.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& v = row[col];
        out.codes.push_back(v == out.value_of[0] ? 0 : 1);
    }
    return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw DataError("column '" + name + "' not found");
}

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line.substr(1));
            continue;
        }
        std::vector<std::string> fields = split_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != table.header.size())
                throw DataError("row has " + std::to_string(fields.size()) +
                                " fields, header has " +
                                std::to_string(table.header.size()));
            table.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw DataError("CSV is empty (header row required)");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string csv_to_string(const CsvTable& table) {
    std::ostringstream out;
    for (const std::string& c : table.comments) out << '#' << c << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << table.header[i] << (i + 1 < table.header.size() ? ',' : '\n');
    for (const auto& row : table.rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? ',' : '\n');
    return out.str();
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << csv_to_string(table);
}

IngestResult ingest(const CsvTable& table, const IngestConfig& cfg) {
    if (table.rows.empty()) throw DataError("dataset has no data rows");
    const std::size_t gcol = table.column(cfg.group_col);
    const std::size_t lcol = table.column(cfg.label_col);

    std::vector<std::size_t> fcols;
    if (cfg.feature_cols.empty()) {
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (i != gcol && i != lcol) fcols.push_back(i);
    } else {
        for (const std::string& name : cfg.feature_cols) {
            const std::size_t i = table.column(name);
            if (i == gcol || i == lcol)
                throw DataError("feature list includes the group or label column");
            fcols.push_back(i);
        }
    }
    if (fcols.empty()) throw DataError("no feature columns left");

    const ColumnCoding gcode = encode_binary_column(table.rows, gcol, cfg.group_col);
    const ColumnCoding lcode = encode_binary_column(table.rows, lcol, cfg.label_col);

    IngestResult out;
    out.data.label = lcode.codes;
    for (const auto& row : table.rows) {
        std::vector<double> feats;
        feats.reserve(fcols.size());
        for (std::size_t i : fcols)
            feats.push_back(parse_double(row[i], "column '" + table.header[i] + "'"));
        out.data.features.push_back(std::move(feats));
    }
    for (std::size_t i : fcols) out.data.feature_names.push_back(table.header[i]);

    if (lcode.by_occurrence && lcode.value_of.size() == 2)
        out.warnings.push_back("label mapping by first occurrence: '" +
                               lcode.value_of[0] + "'->0, '" + lcode.value_of[1] +
                               "'->1");
    if (lcode.value_of.size() < 2)
        out.warnings.push_back("label column has a single value");

    // Base rate per raw group code decides which value becomes group A.
    long count[2] = {0, 0}, pos[2] = {0, 0};
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        count[gcode.codes[r]] += 1;
        pos[gcode.codes[r]] += out.data.label[r];
    }
    if (count[0] == 0 || count[1] == 0)
        throw DataError("group column has a single value; need two groups");
    const Rat rate0(pos[0], count[0]);
    const Rat rate1(pos[1], count[1]);

    int a_code;
    if (cfg.group_a_value) {
        if (*cfg.group_a_value == gcode.value_of[0])
            a_code = 0;
        else if (*cfg.group_a_value == gcode.value_of[1])
            a_code = 1;
        else
            throw DataError("--group-a value '" + *cfg.group_a_value +
                            "' does not appear in the group column");
    } else {
        a_code = rate0 >= rate1 ? 0 : 1;
    }
    if ((a_code == 0 ? rate0 < rate1 : rate1 < rate0))
        out.warnings.push_back(
            "group A ('" + gcode.value_of[a_code] +
            "') has the lower base rate; bound orientations assume A is advantaged");

    out.group_a_value = gcode.value_of[a_code];
    out.group_b_value = gcode.value_of[1 - a_code];
    out.data.group.reserve(gcode.codes.size());
    for (int c : gcode.codes)
        out.data.group.push_back(c == a_code ? Group::A : Group::B);
    out.data.validate();
    return out;
}

ScoreFile read_scores(const std::string& path,
                      const std::optional<std::string>& group_a_value) {
    const CsvTable table = read_csv(path);
    if (table.rows.empty()) throw DataError("score file has no data rows");
    const std::size_t idc = table.column("row_id");
    const std::size_t gc = table.column("group");
    const std::size_t sc = table.column("score");
    const std::size_t lc = table.column("label");

    const ColumnCoding gcode = encode_binary_column(table.rows, gc, "group");
    const ColumnCoding lcode = encode_binary_column(table.rows, lc, "label");

    ScoreFile out;
    std::unordered_set<std::string> seen;  // row_id is the join key
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const double s = parse_double(table.rows[r][sc], "score column");
        if (s < 0.0 || s > 1.0)
            throw DataError("score " + table.rows[r][sc] + " outside [0,1]");
        if (!seen.insert(table.rows[r][idc]).second)
            throw DataError("duplicate row_id '" + table.rows[r][idc] + "'");
        out.rows.push_back(
            ScoreRow{table.rows[r][idc], Group::A, s, lcode.codes[r]});
    }
    if (lcode.by_occurrence && lcode.value_of.size() == 2)
        out.warnings.push_back("label mapping by first occurrence: '" +
                               lcode.value_of[0] + "'->0, '" + lcode.value_of[1] +
                               "'->1");

    long count[2] = {0, 0}, pos[2] = {0, 0};
    for (std::size_t r = 0; r < out.rows.size(); ++r) {
        count[gcode.codes[r]] += 1;
        pos[gcode.codes[r]] += out.rows[r].label;
    }
    if (count[0] == 0 || count[1] == 0)
        throw DataError("score file needs two groups");

    int a_code;
    if (group_a_value) {
        if (*group_a_value == gcode.value_of[0])
            a_code = 0;
        else if (*group_a_value == gcode.value_of[1])
            a_code = 1;
        else
            throw DataError("group value '" + *group_a_value + "' not present");
    } else {
        a_code = rat_frac(pos[0], count[0]) >= rat_frac(pos[1], count[1]) ? 0 : 1;
    }
    out.group_a_value = gcode.value_of[a_code];
    out.group_b_value = gcode.value_of[1 - a_code];
    for (std::size_t r = 0; r < out.rows.size(); ++r)
        out.rows[r].group = gcode.codes[r] == a_code ? Group::A : Group::B;
    return out;
}

EmpiricalDistribution read_dist_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad JSON in '" + path + "': " + std::string(e.what()));
    }
    if (!doc.contains("points") || !doc["points"].is_array())
        throw DataError("distribution file needs a 'points' array");
    std::vector<PointRecord> points;
    for (const auto& p : doc["points"]) {
        PointRecord rec;
        try {
            rec.id = p.at("id").get<std::string>();
            rec.mass = parse_rational(p.at("mass").get<std::string>());
            rec.label_rate = parse_rational(p.at("label_rate").get<std::string>());
            const std::string g = p.at("group").get<std::string>();
            if (g != "A" && g != "B")
                throw DataError("point '" + rec.id + "' has group '" + g + "'");
            rec.group = g == "A" ? Group::A : Group::B;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad point record: " + std::string(e.what()));
        } catch (const std::invalid_argument& e) {
            throw DataError("bad rational in point record: " + std::string(e.what()));
        }
        points.push_back(std::move(rec));
    }
    return EmpiricalDistribution(std::move(points));
}

void write_dist_json(const std::string& path, const EmpiricalDistribution& dist) {
    nlohmann::ordered_json doc;
    doc["points"] = nlohmann::ordered_json::array();
    for (const PointRecord& p : dist.points()) {
        nlohmann::ordered_json rec;
        rec["id"] = p.id;
        rec["mass"] = rat_to_string(p.mass);
        rec["label_rate"] = rat_to_string(p.label_rate);
        rec["group"] = group_name(p.group);
        doc["points"].push_back(std::move(rec));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

}  // namespace fairmult
