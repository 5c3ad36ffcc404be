#include "osud/quantile_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "osud/hill_kertz.hpp"

namespace osud {

QuantileDistribution::QuantileDistribution(std::vector<Piece> pieces, std::string label)
    : pieces_(std::move(pieces)), label_(std::move(label)) {
    validate();
}

void QuantileDistribution::validate() const {
    if (pieces_.empty()) throw std::invalid_argument("distribution has no pieces");
    double q = 0.0;
    double prev_value = std::numeric_limits<double>::infinity();
    for (const auto& piece : pieces_) {
        if (std::abs(piece.q_lo - q) > 1e-12)
            throw std::invalid_argument("pieces do not tile quantile space");
        if (piece.q_hi <= piece.q_lo) throw std::invalid_argument("piece has nonpositive mass");
        if (piece.kind == Piece::Kind::Atom) {
            if (piece.value < 0.0) throw std::invalid_argument("negative value");
            if (piece.value > prev_value + 1e-9 * std::max(1.0, prev_value))
                throw std::invalid_argument("quantile map not nonincreasing");
            prev_value = piece.value;
        } else {
            if (!piece.quantile_fn) throw std::invalid_argument("continuous piece without fn");
            // spot-check monotonicity and sign on a coarse grid
            double last = prev_value;
            for (int k = 0; k <= 64; ++k) {
                double u = piece.q_lo + (piece.q_hi - piece.q_lo) * k / 64.0;
                if (k == 0) u = std::nextafter(piece.q_lo, piece.q_hi);
                double v = piece.quantile_fn(u);
                if (v < -1e-12) throw std::invalid_argument("negative value");
                if (v > last + 1e-9 * std::max(1.0, std::abs(last)))
                    throw std::invalid_argument("quantile map not nonincreasing");
                last = v;
            }
            prev_value = last;
        }
        q = piece.q_hi;
    }
    if (std::abs(q - 1.0) > 1e-12) throw std::invalid_argument("piece masses do not sum to 1");
}

double QuantileDistribution::inverse_cdf(double q) const {
    if (!(q > 0.0) || q > 1.0) throw std::domain_error("inverse_cdf: q outside (0,1]");
    for (const auto& piece : pieces_) {
        if (q <= piece.q_hi + 1e-15) {
            if (piece.kind == Piece::Kind::Atom) return piece.value;
            return std::max(0.0, piece.quantile_fn(std::min(q, piece.q_hi)));
        }
    }
    const auto& last = pieces_.back();
    return last.kind == Piece::Kind::Atom ? last.value : std::max(0.0, last.quantile_fn(1.0));
}

double QuantileDistribution::partial_expectation(double q) const {
    if (q < 0.0 || q > 1.0 + 1e-12) throw std::domain_error("partial_expectation: q outside [0,1]");
    if (q <= 0.0) return 0.0;
    q = std::min(q, 1.0);
    KahanSum total;
    for (const auto& piece : pieces_) {
        if (piece.q_lo >= q) break;
        double hi = std::min(q, piece.q_hi);
        if (piece.kind == Piece::Kind::Atom) {
            total.add(piece.value * (hi - piece.q_lo));
        } else {
            auto r = adaptive_simpson(piece.quantile_fn, piece.q_lo, hi, 1e-11, 1e-15);
            total.add(r.value);
        }
    }
    return total.value();
}

bool QuantileDistribution::has_atoms() const {
    for (const auto& piece : pieces_)
        if (piece.kind == Piece::Kind::Atom) return true;
    return false;
}

Instance::Instance(long n_, QuantileDistribution dist_, double p_, double zeta_)
    : n(n_), dist(std::move(dist_)), p(p_), zeta(zeta_) {
    if (n < 1) throw std::invalid_argument("instance: n must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("instance: p must lie in (0,1)");
    if (zeta < 0.0 || zeta > 1.0) throw std::invalid_argument("instance: zeta must lie in [0,1]");
}

QuantileDistribution uniform_dist(double a, double b) {
    if (!(b > a) || a < 0.0) throw std::invalid_argument("uniform_dist: need 0 <= a < b");
    QuantileDistribution::Piece piece{QuantileDistribution::Piece::Kind::Continuous, 0.0, 1.0, 0.0,
                                      [a, b](double q) { return a + (b - a) * (1.0 - q); }};
    return QuantileDistribution({piece}, "uniform[" + std::to_string(a) + "," + std::to_string(b) + "]");
}

QuantileDistribution point_mass(double value) {
    return from_atoms({{value, 1.0}}, "pointmass(" + std::to_string(value) + ")");
}

QuantileDistribution truncated_exponential(double rate, double cap) {
    if (rate <= 0.0 || cap <= 0.0) throw std::invalid_argument("truncated_exponential: bad params");
    double tail = std::exp(-rate * cap);
    QuantileDistribution::Piece piece{
        QuantileDistribution::Piece::Kind::Continuous, 0.0, 1.0, 0.0,
        [rate, tail](double q) { return -std::log(tail + q * (1.0 - tail)) / rate; }};
    return QuantileDistribution({piece}, "truncexp(rate=" + std::to_string(rate) +
                                             ",cap=" + std::to_string(cap) + ")");
}

QuantileDistribution from_quantile_fn(std::function<double(double)> fn, std::string label) {
    QuantileDistribution::Piece piece{QuantileDistribution::Piece::Kind::Continuous, 0.0, 1.0, 0.0,
                                      std::move(fn)};
    return QuantileDistribution({piece}, std::move(label));
}

QuantileDistribution from_atoms(std::vector<std::pair<double, double>> value_prob,
                                std::string label) {
    if (value_prob.empty()) throw std::invalid_argument("from_atoms: empty support");
    std::sort(value_prob.begin(), value_prob.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double total = 0.0;
    for (const auto& [v, m] : value_prob) {
        if (v < 0.0 || m < 0.0) throw std::invalid_argument("from_atoms: negative entry");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("from_atoms: masses must sum to 1");
    std::vector<QuantileDistribution::Piece> pieces;
    double q = 0.0;
    for (std::size_t i = 0; i < value_prob.size(); ++i) {
        double v = value_prob[i].first;
        double m = value_prob[i].second / total;
        while (i + 1 < value_prob.size() && value_prob[i + 1].first == v) {
            m += value_prob[i + 1].second / total;
            ++i;
        }
        if (m <= 0.0) continue;
        pieces.push_back({QuantileDistribution::Piece::Kind::Atom, q, q + m, v, nullptr});
        q += m;
    }
    pieces.back().q_hi = 1.0;  // absorb rounding
    return QuantileDistribution(std::move(pieces), std::move(label));
}

QuantileDistribution hard_instance_dist(double a1, double a2, double beta, long n) {
    if (beta > static_cast<double>(n)) throw std::invalid_argument("hard_instance_dist: beta > n");
    if (beta <= 0.0 || n < 1) throw std::invalid_argument("hard_instance_dist: bad params");
    if (a1 < 0.0 || a2 < 0.0 || (a1 == 0.0 && a2 == 0.0))
        throw std::invalid_argument("hard_instance_dist: need a1, a2 >= 0, not both 0");
    double dn = static_cast<double>(n);
    double spike_mass = 1.0 / (dn * dn);
    double plateau_mass = std::max(0.0, std::min(beta / dn, 1.0) - spike_mass);
    double zero_mass = std::max(0.0, 1.0 - spike_mass - plateau_mass);
    std::vector<std::pair<double, double>> atoms{{a1 * dn, spike_mass}};
    if (plateau_mass > 0.0) atoms.push_back({a2, plateau_mass});
    if (zero_mass > 0.0) atoms.push_back({0.0, zero_mass});
    return from_atoms(std::move(atoms), "hard_instance(a1=" + std::to_string(a1) +
                                            ",a2=" + std::to_string(a2) +
                                            ",beta=" + std::to_string(beta) +
                                            ",n=" + std::to_string(n) + ")");
}

QuantileDistribution upper_bound_dist(double eps, double p, long n, double zeta,
                                      const OdeSolution& y) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("upper_bound_dist: eps outside (0,1)");
    double recov = 1.0 - (1.0 - zeta) * p;
    double t_edge = 1.0 - eps;
    double y_edge = y.y_at(t_edge);
    long floor_n = static_cast<long>(std::ceil(-std::log(y_edge) / p));
    if (n < floor_n)
        throw std::invalid_argument("upper_bound_dist: n below the horizon floor " +
                                    std::to_string(floor_n));
    double dn = static_cast<double>(n);
    double spike_mass = 1.0 / (dn * dn);
    double spike_value = y.theta() * dn / recov;
    double u_max = -std::log(y_edge) / (p * dn);
    auto tail_fn = [&y, p, dn, recov, t_edge](double u) {
        double v = std::exp(-p * dn * u);
        double x = v >= 1.0 ? 0.0 : y.inverse(v);
        if (x >= t_edge) return 0.0;
        return (p / recov) * y.integral_neg_inv_deriv(x, t_edge);
    };
    std::vector<QuantileDistribution::Piece> pieces;
    pieces.push_back({QuantileDistribution::Piece::Kind::Atom, 0.0, spike_mass, spike_value, nullptr});
    pieces.push_back({QuantileDistribution::Piece::Kind::Continuous, spike_mass, u_max, 0.0, tail_fn});
    if (u_max < 1.0)
        pieces.push_back({QuantileDistribution::Piece::Kind::Atom, u_max, 1.0, 0.0, nullptr});
    return QuantileDistribution(std::move(pieces), "upper_bound(eps=" + std::to_string(eps) +
                                                       ",p=" + std::to_string(p) +
                                                       ",n=" + std::to_string(n) + ")");
}

}  // namespace osud
