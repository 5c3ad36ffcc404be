#include "osud/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace osud {
namespace io {

namespace {

// Linear interpolation over a monotone (q, value) table.
std::function<double(double)> table_fn(std::vector<std::pair<double, double>> table) {
    return [table = std::move(table)](double q) {
        if (q <= table.front().first) return table.front().second;
        if (q >= table.back().first) return table.back().second;
        auto it = std::upper_bound(table.begin(), table.end(), q,
                                   [](double x, const auto& row) { return x < row.first; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        double w = (q - lo.first) / (hi.first - lo.first);
        return lo.second + w * (hi.second - lo.second);
    };
}

}  // namespace

nlohmann::json distribution_to_json(const QuantileDistribution& dist) {
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& piece : dist.pieces()) {
        if (piece.kind == QuantileDistribution::Piece::Kind::Atom) {
            pieces.push_back({{"kind", "atom"},
                              {"mass", piece.q_hi - piece.q_lo},
                              {"value", piece.value}});
        } else {
            nlohmann::json table = nlohmann::json::array();
            const int points = 257;
            for (int k = 0; k < points; ++k) {
                double q = piece.q_lo + (piece.q_hi - piece.q_lo) * k / (points - 1);
                double q_eval = (k == 0) ? std::nextafter(piece.q_lo, piece.q_hi) : q;
                table.push_back({q, piece.quantile_fn(q_eval)});
            }
            pieces.push_back({{"kind", "continuous"},
                              {"q_lo", piece.q_lo},
                              {"q_hi", piece.q_hi},
                              {"table", table}});
        }
    }
    return {{"pieces", pieces}};
}

QuantileDistribution distribution_from_json(const nlohmann::json& j) {
    std::vector<QuantileDistribution::Piece> pieces;
    double q = 0.0;
    for (const auto& pj : j.at("pieces")) {
        std::string kind = pj.at("kind").get<std::string>();
        if (kind == "atom") {
            double mass = pj.at("mass").get<double>();
            double value = pj.at("value").get<double>();
            pieces.push_back({QuantileDistribution::Piece::Kind::Atom, q, q + mass, value, nullptr});
            q += mass;
        } else if (kind == "continuous") {
            double q_lo = pj.at("q_lo").get<double>();
            double q_hi = pj.at("q_hi").get<double>();
            std::vector<std::pair<double, double>> table;
            for (const auto& row : pj.at("table"))
                table.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
            if (table.size() < 2) throw std::invalid_argument("continuous piece: table too short");
            pieces.push_back({QuantileDistribution::Piece::Kind::Continuous, q_lo, q_hi, 0.0,
                              table_fn(std::move(table))});
            q = q_hi;
        } else {
            throw std::invalid_argument("unknown piece kind: " + kind);
        }
    }
    return QuantileDistribution(std::move(pieces));
}

nlohmann::json schedule_to_json(const adaptive::AdaptiveSchedule& schedule) {
    return {{"n", schedule.n},
            {"p", schedule.p},
            {"zeta", schedule.zeta},
            {"theta_n", schedule.theta},
            {"breakpoints", schedule.breakpoints}};
}

adaptive::AdaptiveSchedule schedule_from_json(const nlohmann::json& j) {
    adaptive::AdaptiveSchedule schedule;
    schedule.n = j.at("n").get<long>();
    schedule.p = j.at("p").get<double>();
    schedule.zeta = j.at("zeta").get<double>();
    schedule.theta = j.at("theta_n").get<double>();
    schedule.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    if (schedule.breakpoints.size() != static_cast<std::size_t>(schedule.n) + 1)
        throw std::invalid_argument("schedule: breakpoints size != n+1");
    schedule.log_g.resize(schedule.breakpoints.size());
    for (std::size_t i = 0; i < schedule.breakpoints.size(); ++i)
        schedule.log_g[i] =
            (static_cast<double>(schedule.n) - 1.0) * std::log1p(-schedule.p * schedule.breakpoints[i]);
    return schedule;
}

nlohmann::json discrete_instance_to_json(const dp::DiscreteInstance& inst) {
    nlohmann::json support = nlohmann::json::array();
    for (std::size_t i = 0; i < inst.values.size(); ++i)
        support.push_back({{"value", inst.values[i]}, {"prob", inst.probs[i]}});
    return {{"n", inst.n}, {"p", inst.p}, {"zeta", inst.zeta}, {"support", support}};
}

dp::DiscreteInstance discrete_instance_from_json(const nlohmann::json& j) {
    dp::DiscreteInstance inst;
    inst.n = j.at("n").get<long>();
    inst.p = j.at("p").get<double>();
    inst.zeta = j.at("zeta").get<double>();
    for (const auto& row : j.at("support")) {
        inst.values.push_back(row.at("value").get<double>());
        inst.probs.push_back(row.at("prob").get<double>());
    }
    inst.validate();
    return inst;
}

nlohmann::json noniid_instance_to_json(const noniid::NonIIDInstance& inst) {
    nlohmann::json dists = nlohmann::json::array();
    for (const auto& d : inst.dists) dists.push_back(distribution_to_json(d));
    return {{"p", inst.p}, {"zeta", inst.zeta}, {"distributions", dists}};
}

noniid::NonIIDInstance noniid_instance_from_json(const nlohmann::json& j) {
    noniid::NonIIDInstance inst;
    inst.p = j.at("p").get<double>();
    inst.zeta = j.at("zeta").get<double>();
    for (const auto& dj : j.at("distributions")) inst.dists.push_back(distribution_from_json(dj));
    inst.validate();
    return inst;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

QuantileDistribution parse_distribution(const std::string& spec) {
    if (!spec.empty() && spec[0] == '@')
        return distribution_from_json(load_json_file(spec.substr(1)));
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string part;
        while (std::getline(ss, part, ',')) args.push_back(std::stod(part));
    }
    if (name == "uniform") {
        if (args.empty()) return uniform_dist(0.0, 1.0);
        if (args.size() == 2) return uniform_dist(args[0], args[1]);
    } else if (name == "pointmass" && args.size() == 1) {
        return point_mass(args[0]);
    } else if (name == "truncexp" && args.size() == 2) {
        return truncated_exponential(args[0], args[1]);
    } else if (name == "power" && args.size() == 1) {
        double k = args[0];
        if (k <= 0.0) throw std::invalid_argument("power: exponent must be positive");
        return from_quantile_fn([k](double q) { return std::pow(1.0 - q, k); },
                                "power(" + std::to_string(k) + ")");
    }
    throw std::invalid_argument("unrecognized distribution spec: " + spec);
}

}  // namespace io
}  // namespace osud
