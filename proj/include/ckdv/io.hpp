#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdv/record.hpp"

namespace ckdv {

using Json = nlohmann::json;

/// Non-finite reals are written as null and read back as NaN.
Json real_to_json(double x);
double real_from_json(const Json& j);

Json to_json(const RadiusEstimate& r);
RadiusEstimate radius_from_json(const Json& j);
Json to_json(const RecordRow& r);
RecordRow row_from_json(const Json& j);

/// One JSON document per line, flushed after every write.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path& path);
    void write(const Json& record);

private:
    std::ofstream out_;
};

std::vector<Json> read_jsonl(const std::filesystem::path& path);

/// Rebuilds the RunRecord of a simulate run from its JSONL file.
RunRecord read_run_record(const std::filesystem::path& path);

/// Drops every "timestamp" member, recursively.
Json without_timestamps(Json j);

/// Two-column curve: a header line with the column names, then `x<TAB>y` rows.
struct Curve {
    std::string x_name = "x";
    std::string y_name = "y";
    std::vector<double> x;
    std::vector<double> y;
};

void write_tsv(const std::filesystem::path& path, const Curve& curve);
Curve read_tsv(const std::filesystem::path& path);

}  // namespace ckdv
