#ifndef NGSP_TEST_HELPERS_HPP
#define NGSP_TEST_HELPERS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "ngsp/dataset.hpp"
#include "ngsp/grammar.hpp"
#include "ngsp/guide.hpp"
#include "ngsp/likelihood.hpp"
#include "ngsp/rng.hpp"
#include "ngsp/shape.hpp"

namespace ngsp::testing {

// Fixture G1: r -> {A, B}, A -> {a1, a2}.
inline Grammar g1() { return Grammar::parse("root: r\nr -> A ; B\nA -> a1 ; a2\n"); }

// Fixture S1: three regions, four points each, equal areas.
inline Shape s1() {
    Shape s;
    s.id = "S1";
    for (int i = 0; i < 3; ++i) {
        Region r;
        r.id = i;
        const double base = static_cast<double>(i);
        r.points = {{base, 0, 0}, {base + 1, 0, 0}, {base, 1, 0}, {base + 1, 1, 0}};
        r.area = 1.0 / 3.0;
        s.regions.push_back(std::move(r));
    }
    return s;
}

inline LabelAssignment assign(const Grammar& g, const std::vector<std::string>& names) {
    std::vector<LabelId> labels;
    for (const auto& n : names) labels.push_back(g.require_label(n));
    return LabelAssignment(std::move(labels));
}

inline GuideDistribution guide_from_rows(const Grammar& g,
                                         std::vector<std::vector<double>> rows) {
    return GuideDistribution(g.terminals(), std::move(rows));
}

// Random guide over n regions and the grammar's terminals.
inline GuideDistribution random_guide(const Grammar& g, int n, Rng& rng) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(g.terminals().size());
        double sum = 0;
        for (double& p : row) {
            p = 0.05 + rng.next_double();
            sum += p;
        }
        for (double& p : row) p /= sum;
        rows.push_back(std::move(row));
    }
    return guide_from_rows(g, std::move(rows));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Scorers that ignore features and return a fixed value.
inline LogisticModel constant_logistic(double value, int dim) {
    LogisticModel m;
    const std::size_t expanded = 2 * static_cast<std::size_t>(dim);
    m.standardizer.mean.assign(expanded, 0.0);
    m.standardizer.scale.assign(expanded, 1.0);
    m.weights.assign(expanded, 0.0);
    m.bias = logit(value);
    return m;
}

inline BoundedLinearModel constant_area(double value, int dim) {
    BoundedLinearModel m;
    const std::size_t expanded = 2 * static_cast<std::size_t>(dim);
    m.standardizer.mean.assign(expanded, 0.0);
    m.standardizer.scale.assign(expanded, 1.0);
    m.weights.assign(expanded, 0.0);
    m.bias = logit(value);
    return m;
}

inline MultinomialModel constant_multinomial(const std::vector<double>& probs, int dim) {
    MultinomialModel m;
    const std::size_t expanded = 2 * static_cast<std::size_t>(dim);
    m.classes = static_cast<int>(probs.size());
    m.dim = static_cast<int>(expanded);
    m.standardizer.mean.assign(expanded, 0.0);
    m.standardizer.scale.assign(expanded, 1.0);
    m.weights.assign(probs.size() * expanded, 0.0);
    m.bias.resize(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) m.bias[i] = std::log(probs[i]);
    return m;
}

// A bank whose scorers ignore their input: geometry/layout/area return 1 (up
// to clamping) and the label head is uniform, so every proposal combines to
// the same score.
inline ScorerBank unit_bank(const Grammar& g) {
    ScorerBank bank;
    const double one = 1.0 - 1e-15;
    for (LabelId l = 0; l < g.label_count(); ++l) {
        if (l != g.root()) bank.geometry.emplace(l, constant_logistic(one, kGroupFeatureDim));
        if (!g.is_terminal(l))
            bank.layout.emplace(l, constant_logistic(one, kGroupFeatureDim + g.max_fanout()));
        else
            bank.region_area.emplace(l, constant_area(one, kGroupFeatureDim));
    }
    std::vector<double> uniform(g.terminals().size(), 1.0 / g.terminals().size());
    bank.region_label = constant_multinomial(uniform, kGroupFeatureDim);
    return bank;
}

} // namespace ngsp::testing

#endif
