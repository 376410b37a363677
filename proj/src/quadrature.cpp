#include "walkbsde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "walkbsde/normal.hpp"

namespace walkbsde {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights the
// squared first eigenvector components times the measure mass.
void golub_welsch(const Eigen::VectorXd& offdiag, double mass,
                  Eigen::ArrayXd& nodes, Eigen::ArrayXd& weights) {
    const Eigen::Index m = offdiag.size() + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 0; k + 1 < m; ++k) {
        jacobi(k, k + 1) = offdiag[k];
        jacobi(k + 1, k) = offdiag[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("quadrature eigensolve failed");
    nodes = solver.eigenvalues().array();
    weights = mass * solver.eigenvectors().row(0).array().square();
}

}  // namespace

NormalRule gauss_hermite(int m) {
    if (m < 1) throw std::invalid_argument("quadrature order must be positive");
    Eigen::VectorXd offdiag(m - 1);
    for (int k = 1; k < m; ++k) offdiag[k - 1] = std::sqrt(static_cast<double>(k));
    NormalRule rule;
    golub_welsch(offdiag, 1.0, rule.nodes, rule.weights);
    return rule;
}

void gauss_legendre(int m, Eigen::ArrayXd& nodes, Eigen::ArrayXd& weights) {
    if (m < 1) throw std::invalid_argument("quadrature order must be positive");
    Eigen::VectorXd offdiag(m - 1);
    for (int k = 1; k < m; ++k)
        offdiag[k - 1] = static_cast<double>(k) / std::sqrt(4.0 * k * k - 1.0);
    golub_welsch(offdiag, 2.0, nodes, weights);
}

namespace {

constexpr double kWindow = 8.0;  // truncation in standard deviations
constexpr int kPanelOrder = 12;
constexpr int kGradeLevels = 30;  // innermost graded panel ~2^-30 of the span

const Eigen::ArrayXd& panel_nodes() {
    static const auto rule = [] {
        auto r = std::make_pair(Eigen::ArrayXd(), Eigen::ArrayXd());
        gauss_legendre(kPanelOrder, r.first, r.second);
        return r;
    }();
    return rule.first;
}

const Eigen::ArrayXd& panel_weights() {
    static const auto rule = [] {
        auto r = std::make_pair(Eigen::ArrayXd(), Eigen::ArrayXd());
        gauss_legendre(kPanelOrder, r.first, r.second);
        return r;
    }();
    return rule.second;
}

// Panel edges on [a,b], geometrically refined toward whichever ends carry a
// cut; plain halving handles the refinement level.
void segment_edges(double a, double b, bool grade_left, bool grade_right, int level,
                   std::vector<double>& edges) {
    auto push_graded = [&](double from, double to) {
        // edges marching away from `from`, widths doubling each panel
        double span = to - from;
        for (int j = kGradeLevels; j >= 1; --j) edges.push_back(from + span * std::ldexp(1.0, -j));
        edges.push_back(to);
    };
    auto push_uniform = [&](double from, double to) {
        int count = std::max(1, static_cast<int>(std::ceil(std::abs(to - from) / 2.0)));
        for (int j = 1; j <= count; ++j)
            edges.push_back(from + (to - from) * static_cast<double>(j) / count);
    };

    edges.push_back(a);
    if (grade_left && grade_right) {
        double mid = 0.5 * (a + b);
        {  // reversed grading toward a: build then mirror
            std::vector<double> tmp;
            double span = mid - a;
            for (int j = kGradeLevels; j >= 1; --j) tmp.push_back(a + span * std::ldexp(1.0, -j));
            tmp.push_back(mid);
            edges.insert(edges.end(), tmp.begin(), tmp.end());
        }
        {
            std::vector<double> tmp;
            double span = b - mid;
            for (int j = kGradeLevels; j >= 1; --j) tmp.push_back(b - span * std::ldexp(1.0, -j));
            std::reverse(tmp.begin(), tmp.end());
            edges.insert(edges.end(), tmp.begin(), tmp.end());
            edges.push_back(b);
        }
    } else if (grade_left) {
        push_graded(a, b);
    } else if (grade_right) {
        std::vector<double> tmp;
        double span = b - a;
        for (int j = kGradeLevels; j >= 1; --j) tmp.push_back(b - span * std::ldexp(1.0, -j));
        std::reverse(tmp.begin(), tmp.end());
        edges.insert(edges.end(), tmp.begin(), tmp.end());
        edges.push_back(b);
    } else {
        push_uniform(a, b);
    }

    // level halvings
    for (int l = 0; l < level; ++l) {
        std::vector<double> refined;
        refined.reserve(edges.size() * 2);
        refined.push_back(edges.front());
        for (size_t i = 0; i + 1 < edges.size(); ++i) {
            refined.push_back(0.5 * (edges[i] + edges[i + 1]));
            refined.push_back(edges[i + 1]);
        }
        edges.swap(refined);
    }
}

}  // namespace

NormalRule truncated_normal_rule(const std::vector<double>& cuts, int level) {
    std::vector<double> inner;
    for (double c : cuts)
        if (c > -kWindow + 1e-12 && c < kWindow - 1e-12) inner.push_back(c);
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end()), inner.end());

    std::vector<double> breaks;
    breaks.push_back(-kWindow);
    breaks.insert(breaks.end(), inner.begin(), inner.end());
    breaks.push_back(kWindow);

    std::vector<double> edges;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        bool grade_left = i > 0;
        bool grade_right = i + 2 < breaks.size();
        std::vector<double> seg;
        segment_edges(breaks[i], breaks[i + 1], grade_left, grade_right, level, seg);
        if (!edges.empty()) seg.erase(seg.begin());  // shared edge
        edges.insert(edges.end(), seg.begin(), seg.end());
    }

    const Eigen::ArrayXd& gl_nodes = panel_nodes();
    const Eigen::ArrayXd& gl_weights = panel_weights();
    const Eigen::Index per_panel = gl_nodes.size();
    const Eigen::Index total = static_cast<Eigen::Index>(edges.size() - 1) * per_panel;

    NormalRule rule;
    rule.nodes.resize(total);
    rule.weights.resize(total);
    Eigen::Index pos = 0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        double mid = 0.5 * (edges[i] + edges[i + 1]);
        double half = 0.5 * (edges[i + 1] - edges[i]);
        for (Eigen::Index j = 0; j < per_panel; ++j, ++pos) {
            double z = mid + half * gl_nodes[j];
            rule.nodes[pos] = z;
            rule.weights[pos] = half * gl_weights[j] * normal_pdf(z);
        }
    }
    return rule;
}

}  // namespace walkbsde
