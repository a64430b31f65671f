#pragma once

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "treestab/feature_space.hpp"

namespace treestab {

struct Dataset {
    FeatureSpace space;
    std::vector<std::vector<double>> rows;  // categorical cells hold category indices
    std::vector<int> labels;
    std::vector<int> row_ids;  // positions in the originally ingested table

    int n() const { return static_cast<int>(rows.size()); }

    Dataset subset(const std::vector<int>& idx) const {
        Dataset out;
        out.space = space;
        out.rows.reserve(idx.size());
        out.labels.reserve(idx.size());
        out.row_ids.reserve(idx.size());
        for (int i : idx) {
            out.rows.push_back(rows[i]);
            out.labels.push_back(labels[i]);
            out.row_ids.push_back(row_ids[i]);
        }
        return out;
    }

    std::vector<int> class_counts() const {
        std::vector<int> c(space.num_classes, 0);
        for (int y : labels) ++c[y];
        return c;
    }
};

struct Schema {
    FeatureSpace space;
    std::string label_column;
};

Schema schema_from_json(const nlohmann::json& j);
Schema load_schema_file(const std::string& path);

struct IngestResult {
    Dataset data;
    long clamped = 0;  // numeric cells pulled back into the schema bounds
};

// CSV with a header; every column must be a schema feature or the label column,
// and every schema feature must be present. Numeric cells outside the schema
// bounds are clamped and counted.
IngestResult ingest_csv(std::istream& in, const Schema& schema, const std::string& origin = "csv");
IngestResult load_csv_file(const std::string& path, const Schema& schema);

}  // namespace treestab
