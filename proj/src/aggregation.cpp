#include "mgcc/aggregation.hpp"

#include "mgcc/error.hpp"
#include "mgcc/state_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mgcc::aggregation {

MgEquivalent aggregate(std::span<const DgSpec> dgs, double power)
{
    if (dgs.empty()) {
        throw Error(Errc::EmptyMg, "microgrid has no generators");
    }
    double inv_droop = 0.0;
    double weighted = 0.0;
    double weights = 0.0;
    for (const DgSpec& dg : dgs) {
        if (!(dg.droop > 0.0) || !(dg.cutoff > 0.0)) {
            throw Error(Errc::InvalidArgument, "droop and cutoff must be positive");
        }
        if (dg.cutoff != dgs.front().cutoff) {
            throw Error(Errc::InvalidArgument, "generators of one microgrid share a cutoff");
        }
        const double w = 1.0 / (dg.cutoff * dg.droop);
        inv_droop += 1.0 / dg.droop;
        weighted += w * dg.omega;
        weights += w;
    }
    MgEquivalent mg;
    mg.droop = 1.0 / inv_droop;
    mg.omega = weighted / weights;
    mg.power = power;
    mg.omega_n = set_point(mg.omega, mg.droop, power);
    return mg;
}

double set_point(double omega, double droop, double power) noexcept
{
    return omega + droop * power;
}

std::vector<double> droops_from_ratings(std::span<const double> ratings, double c)
{
    if (!(c > 0.0)) {
        throw Error(Errc::InvalidArgument, "droop constant must be positive");
    }
    std::vector<double> m;
    m.reserve(ratings.size());
    for (const double r : ratings) {
        if (!(r > 0.0)) {
            throw Error(Errc::InvalidArgument, "ratings must be positive");
        }
        m.push_back(c / r);
    }
    return m;
}

std::vector<DgSpec> dgs_from_ratings(std::span<const double> ratings, double c, double omega,
                                     double cutoff)
{
    const std::vector<double> m = droops_from_ratings(ratings, c);
    std::vector<DgSpec> dgs;
    for (std::size_t k = 0; k < ratings.size(); ++k) {
        dgs.push_back({ratings[k], m[k], omega, cutoff});
    }
    return dgs;
}

std::vector<double> share_power(double total, std::span<const DgSpec> dgs)
{
    if (dgs.empty()) {
        throw Error(Errc::EmptyMg, "microgrid has no generators");
    }
    const double ref = dgs.front().droop * dgs.front().rating;
    double inv_sum = 0.0;
    for (const DgSpec& dg : dgs) {
        const double product = dg.droop * dg.rating;
        if (!(dg.droop > 0.0) || std::abs(product - ref) > 1e-9 * std::abs(ref)) {
            std::ostringstream os;
            os << "m_P * P_max differs across generators (" << ref << " vs " << product << ")";
            throw Error(Errc::InconsistentDroops, os.str());
        }
        inv_sum += 1.0 / dg.droop;
    }
    std::vector<double> shares;
    shares.reserve(dgs.size());
    for (const DgSpec& dg : dgs) {
        shares.push_back(total * (1.0 / dg.droop) / inv_sum);
    }
    return shares;
}

Objectives objective_metrics(std::span<const double> frequency, std::span<const double> power,
                             double omega_ref)
{
    Objectives o;
    o.sync_error = max_disagreement(frequency);
    o.sharing_error = max_disagreement(power);
    for (const double w : frequency) {
        o.ref_deviation = std::max(o.ref_deviation, std::abs(w - omega_ref));
    }
    return o;
}

}  // namespace mgcc::aggregation
