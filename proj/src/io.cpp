#include "ckdv/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "ckdv/config.hpp"
#include "ckdv/errors.hpp"

namespace ckdv {

Json real_to_json(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

double real_from_json(const Json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

Json to_json(const RadiusEstimate& r) {
    return Json{{"sigma_hat", real_to_json(r.sigma_hat)},
                {"k_lo", r.k_lo},
                {"k_hi", r.k_hi},
                {"slope_stderr", real_to_json(r.slope_stderr)},
                {"residual", real_to_json(r.residual)},
                {"floor_hit", r.floor_hit},
                {"modes_used", r.modes_used}};
}

RadiusEstimate radius_from_json(const Json& j) {
    RadiusEstimate r;
    r.sigma_hat = real_from_json(j.at("sigma_hat"));
    r.k_lo = j.at("k_lo").get<int>();
    r.k_hi = j.at("k_hi").get<int>();
    r.slope_stderr = real_from_json(j.at("slope_stderr"));
    r.residual = real_from_json(j.at("residual"));
    r.floor_hit = j.at("floor_hit").get<bool>();
    r.modes_used = j.at("modes_used").get<int>();
    return r;
}

namespace {

Json reals(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(real_to_json(x));
    return a;
}

std::vector<double> reals_from(const Json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(real_from_json(x));
    return out;
}

}  // namespace

Json to_json(const RecordRow& r) {
    Json j{{"type", "row"},
           {"t", real_to_json(r.t)},
           {"step", r.step},
           {"l2_u", real_to_json(r.l2_u)},
           {"l2_v", real_to_json(r.l2_v)},
           {"pair_l2", real_to_json(r.pair_l2)},
           {"gevrey_u", reals(r.gevrey_u)},
           {"gevrey_v", reals(r.gevrey_v)},
           {"radius_u", r.radius_u ? to_json(*r.radius_u) : Json(nullptr)},
           {"radius_v", r.radius_v ? to_json(*r.radius_v) : Json(nullptr)},
           {"invariant", r.invariant ? real_to_json(*r.invariant) : Json(nullptr)},
           {"mean_u", real_to_json(r.mean_u)},
           {"mean_v", real_to_json(r.mean_v)},
           {"max_abs_u", real_to_json(r.max_abs_u)},
           {"max_abs_v", real_to_json(r.max_abs_v)}};
    return j;
}

RecordRow row_from_json(const Json& j) {
    RecordRow r;
    r.t = real_from_json(j.at("t"));
    r.step = j.at("step").get<std::size_t>();
    r.l2_u = real_from_json(j.at("l2_u"));
    r.l2_v = real_from_json(j.at("l2_v"));
    r.pair_l2 = real_from_json(j.at("pair_l2"));
    r.gevrey_u = reals_from(j.at("gevrey_u"));
    r.gevrey_v = reals_from(j.at("gevrey_v"));
    if (!j.at("radius_u").is_null()) r.radius_u = radius_from_json(j.at("radius_u"));
    if (!j.at("radius_v").is_null()) r.radius_v = radius_from_json(j.at("radius_v"));
    if (!j.at("invariant").is_null()) r.invariant = real_from_json(j.at("invariant"));
    r.mean_u = real_from_json(j.at("mean_u"));
    r.mean_v = real_from_json(j.at("mean_v"));
    r.max_abs_u = real_from_json(j.at("max_abs_u"));
    r.max_abs_v = real_from_json(j.at("max_abs_v"));
    return r;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
}

void JsonlWriter::write(const Json& record) {
    out_ << record.dump() << '\n';
    out_.flush();
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::vector<Json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(Json::parse(line));
    }
    return out;
}

RunRecord read_run_record(const std::filesystem::path& path) {
    RunRecord rec;
    for (const auto& j : read_jsonl(path)) {
        const std::string type = j.at("type").get<std::string>();
        if (type == "header") {
            rec.config_snapshot = j.at("config").get<std::string>();
        } else if (type == "simulate") {
            rec.gevrey_sigmas = reals_from(j.at("gevrey_sigmas"));
            if (!j.at("eta").is_null()) rec.eta = real_from_json(j.at("eta"));
            rec.dt = real_from_json(j.at("dt"));
        } else if (type == "row") {
            rec.rows.push_back(row_from_json(j));
        } else if (type == "status") {
            const std::string s = j.at("status").get<std::string>();
            rec.status = s == to_string(RunStatus::Completed) ? RunStatus::Completed
                         : s == to_string(RunStatus::BlowUp)  ? RunStatus::BlowUp
                                                               : RunStatus::Failed;
            rec.message = j.at("message").get<std::string>();
            if (j.contains("timestamp")) rec.wall_time_s = j.at("timestamp").at("wall_time_s").get<double>();
        }
    }
    return rec;
}

Json without_timestamps(Json j) {
    if (j.is_object()) {
        j.erase("timestamp");
        for (auto& [k, v] : j.items()) v = without_timestamps(v);
    } else if (j.is_array()) {
        for (auto& v : j) v = without_timestamps(v);
    }
    return j;
}

void write_tsv(const std::filesystem::path& path, const Curve& curve) {
    if (curve.x.size() != curve.y.size()) throw InvalidParameter("curve columns differ in length");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << curve.x_name << '\t' << curve.y_name << '\n';
    for (std::size_t i = 0; i < curve.x.size(); ++i)
        out << format_real(curve.x[i]) << '\t' << format_real(curve.y[i]) << '\n';
}

Curve read_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    Curve c;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty curve file '" + path.string() + "'");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error("curve header needs two columns");
    c.x_name = line.substr(0, tab);
    c.y_name = line.substr(tab + 1);
    auto num = [&](std::string_view s) {
        double x = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc() || p != s.data() + s.size())
            throw Error("bad number '" + std::string(s) + "' in " + path.string());
        return x;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto t = line.find('\t');
        if (t == std::string::npos) throw Error("curve row needs two columns");
        c.x.push_back(num(std::string_view(line).substr(0, t)));
        c.y.push_back(num(std::string_view(line).substr(t + 1)));
    }
    return c;
}

}  // namespace ckdv
