#include "walkbsde/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "walkbsde/errors.hpp"
#include "walkbsde/normal.hpp"

namespace walkbsde {

namespace {
constexpr double kMergeTol = 1e-12;

// Sorts (value, prob) pairs and merges atoms within kMergeTol of the
// cluster representative.
Distribution1D sorted_merged_finite(std::vector<std::pair<double, double>> atoms) {
    std::sort(atoms.begin(), atoms.end());
    std::vector<double> points;
    std::vector<double> probs;
    points.reserve(atoms.size());
    probs.reserve(atoms.size());
    for (const auto& [v, p] : atoms) {
        if (!points.empty() && v - points.back() <= kMergeTol) {
            probs.back() += p;
        } else {
            points.push_back(v);
            probs.push_back(p);
        }
    }
    Eigen::ArrayXd pts = Eigen::Map<Eigen::ArrayXd>(points.data(), points.size());
    Eigen::ArrayXd prb = Eigen::Map<Eigen::ArrayXd>(probs.data(), probs.size());
    return Distribution1D::finite(std::move(pts), std::move(prb));
}
}  // namespace

Distribution1D Distribution1D::finite(Eigen::ArrayXd points, Eigen::ArrayXd probs) {
    if (points.size() == 0) throw std::invalid_argument("empty distribution");
    if (points.size() != probs.size())
        throw std::invalid_argument("support and probability sizes differ");
    for (Eigen::Index i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]))
            throw std::invalid_argument("finite support must be strictly increasing");
    if ((probs < 0.0).any()) throw std::invalid_argument("negative probability");
    long double total = 0.0L;
    for (Eigen::Index i = 0; i < probs.size(); ++i) total += probs[i];
    if (std::abs(static_cast<double>(total) - 1.0) > 1e-12)
        throw std::invalid_argument("probabilities sum to " +
                                    std::to_string(static_cast<double>(total)));
    return Distribution1D(Kind::Finite, std::move(points), std::move(probs));
}

Distribution1D Distribution1D::point_mass(double value) {
    Eigen::ArrayXd v(1), p(1);
    v[0] = value;
    p[0] = 1.0;
    return Distribution1D(Kind::Finite, std::move(v), std::move(p));
}

Distribution1D Distribution1D::quantile_sampled(Eigen::ArrayXd values) {
    if (values.size() == 0) throw std::invalid_argument("empty distribution");
    for (Eigen::Index i = 0; i + 1 < values.size(); ++i)
        if (values[i] > values[i + 1])
            throw std::invalid_argument("quantile values must be nondecreasing");
    return Distribution1D(Kind::QuantileSampled, std::move(values), Eigen::ArrayXd());
}

Distribution1D Distribution1D::from_marginal(const WalkMarginal& law, double shift) {
    return Distribution1D(Kind::Finite, law.support + shift, law.probs);
}

double Distribution1D::mean() const {
    if (kind_ == Kind::Finite) return (values_ * probs_).sum();
    return values_.mean();
}

double Distribution1D::expectation(const std::function<double(double)>& f) const {
    double acc = 0.0;
    if (kind_ == Kind::Finite) {
        for (Eigen::Index i = 0; i < values_.size(); ++i) acc += probs_[i] * f(values_[i]);
    } else {
        for (Eigen::Index i = 0; i < values_.size(); ++i) acc += f(values_[i]);
        acc /= static_cast<double>(values_.size());
    }
    return acc;
}

Distribution1D gaussian_quantiles(double mean, double variance, Eigen::Index count) {
    if (count < 2) throw std::invalid_argument("quantile sample needs at least 2 points");
    if (variance < 0.0) throw std::invalid_argument("negative variance");
    Eigen::ArrayXd values(count);
    if (variance == 0.0) {
        values.setConstant(mean);
        return Distribution1D::quantile_sampled(std::move(values));
    }
    const double sigma = std::sqrt(variance);
    const double m = static_cast<double>(count);
    for (Eigen::Index i = 0; 2 * i < count; ++i) {
        double p = (static_cast<double>(i) + 0.5) / m;
        double z = inverse_normal_cdf(p);
        values[i] = mean + sigma * z;
        values[count - 1 - i] = mean - sigma * z;
    }
    if (count % 2 == 1) values[count / 2] = mean;
    return Distribution1D::quantile_sampled(std::move(values));
}

Distribution1D pushforward(const Distribution1D& d, const std::function<double(double)>& map) {
    if (d.kind() == Distribution1D::Kind::QuantileSampled) {
        Eigen::ArrayXd mapped(d.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            mapped[i] = map(d.values()[i]);
            if (!std::isfinite(mapped[i]))
                throw EvaluationError("pushforward map produced a non-finite value", 0.0,
                                      d.values()[i]);
        }
        std::sort(mapped.data(), mapped.data() + mapped.size());
        return Distribution1D::quantile_sampled(std::move(mapped));
    }
    std::vector<std::pair<double, double>> atoms(static_cast<size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        double v = map(d.values()[i]);
        if (!std::isfinite(v))
            throw EvaluationError("pushforward map produced a non-finite value", 0.0,
                                  d.values()[i]);
        atoms[static_cast<size_t>(i)] = {v, d.probs()[i]};
    }
    return sorted_merged_finite(std::move(atoms));
}

}  // namespace walkbsde
