#include "treestab/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "treestab/errors.hpp"
#include "treestab/tree_io.hpp"

namespace treestab {

Schema schema_from_json(const nlohmann::json& j) {
    require_data(j.is_object() && j.contains("label") && j.contains("features"),
                 "schema needs 'label' and 'features'");
    const nlohmann::json& lab = j["label"];
    require_data(lab.is_object() && lab.contains("column") && lab.contains("classes"),
                 "schema label block needs 'column' and 'classes'");

    Schema s;
    s.label_column = lab["column"].get<std::string>();
    nlohmann::json spacedoc;
    spacedoc["features"] = j["features"];
    spacedoc["classes"] = lab["classes"];
    s.space = space_from_json(spacedoc);
    require_data(!s.space.class_names.empty(), "schema classes must be named");
    return s;
}

Schema load_schema_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require_data(f.good(), "cannot open schema file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    try {
        return schema_from_json(j);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& cell, const std::string& where) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
    double v = 0.0;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e || b == e)
        throw DataError(where + ": cannot parse numeric value '" + cell + "'");
    return v;
}

}  // namespace

IngestResult ingest_csv(std::istream& in, const Schema& schema, const std::string& origin) {
    std::string line;
    require_data(static_cast<bool>(std::getline(in, line)), origin + ": empty input");
    std::vector<std::string> header = split_csv_line(line);

    const FeatureSpace& space = schema.space;
    std::unordered_map<std::string, int> feature_of;
    for (int j = 0; j < space.size(); ++j) feature_of[space.features[j].name] = j;

    std::vector<int> col_to_feature(header.size(), -1);
    int label_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == schema.label_column) {
            require_data(label_col < 0, origin + ": duplicate label column");
            label_col = static_cast<int>(c);
        } else {
            auto it = feature_of.find(header[c]);
            require_data(it != feature_of.end(),
                         origin + ": column '" + header[c] + "' is not in the schema");
            require_data(col_to_feature[c] == -1, origin + ": duplicate column '" + header[c] + "'");
            for (int cc : col_to_feature)
                require_data(cc != it->second, origin + ": duplicate column '" + header[c] + "'");
            col_to_feature[c] = it->second;
        }
    }
    require_data(label_col >= 0, origin + ": label column '" + schema.label_column + "' missing");
    std::vector<char> covered(space.size(), 0);
    for (int f : col_to_feature)
        if (f >= 0) covered[f] = 1;
    for (int j = 0; j < space.size(); ++j)
        require_data(covered[j],
                     origin + ": schema feature '" + space.features[j].name + "' missing from CSV");

    std::unordered_map<std::string, int> class_of;
    for (int k = 0; k < space.num_classes; ++k) class_of[space.class_names[k]] = k;
    std::vector<std::unordered_map<std::string, int>> cat_of(space.size());
    for (int j = 0; j < space.size(); ++j)
        if (space.features[j].kind == FeatureKind::Categorical)
            for (int c = 0; c < space.features[j].cardinality; ++c)
                cat_of[j][space.features[j].categories[c]] = c;

    IngestResult out;
    out.data.space = space;
    long rowno = 1;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> cells = split_csv_line(line);
        require_data(cells.size() == header.size(),
                     origin + ": row " + std::to_string(rowno) + " has " +
                         std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(header.size()));
        std::vector<double> row(space.size(), 0.0);
        int label = -1;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::string where = origin + ": row " + std::to_string(rowno) + ", column '" +
                                header[c] + "'";
            if (static_cast<int>(c) == label_col) {
                auto it = class_of.find(cells[c]);
                require_data(it != class_of.end(), where + ": unknown class '" + cells[c] + "'");
                label = it->second;
                continue;
            }
            int j = col_to_feature[c];
            const Feature& f = space.features[j];
            if (f.kind == FeatureKind::Numeric) {
                double v = parse_number(cells[c], where);
                require_data(std::isfinite(v), where + ": non-finite value");
                if (v < f.lower) {
                    v = f.lower;
                    ++out.clamped;
                } else if (v > f.upper) {
                    v = f.upper;
                    ++out.clamped;
                }
                row[j] = v;
            } else {
                auto it = cat_of[j].find(cells[c]);
                require_data(it != cat_of[j].end(),
                             where + ": unknown category '" + cells[c] + "'");
                row[j] = static_cast<double>(it->second);
            }
        }
        out.data.rows.push_back(std::move(row));
        out.data.labels.push_back(label);
        out.data.row_ids.push_back(static_cast<int>(out.data.rows.size()) - 1);
    }
    require_data(!out.data.rows.empty(), origin + ": no data rows");
    return out;
}

IngestResult load_csv_file(const std::string& path, const Schema& schema) {
    std::ifstream f(path, std::ios::binary);
    require_data(f.good(), "cannot open data file: " + path);
    return ingest_csv(f, schema, path);
}

}  // namespace treestab
