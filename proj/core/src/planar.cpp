#include "exitmap/planar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exitmap/parallel.hpp"

namespace exitmap {

const char* to_string(CheckVerdict v) {
    switch (v) {
        case CheckVerdict::Pass: return "pass";
        case CheckVerdict::Fail: return "fail";
        case CheckVerdict::Inconclusive: return "inconclusive";
        case CheckVerdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

bool ParametricMap::total() const {
    return std::all_of(samples.begin(), samples.end(),
                       [](const MapSample& m) { return m.status == MapStatus::Defined; });
}

bool ParametricMap::continuous() const { return total() && marks.empty(); }

namespace {

void annotate_discontinuities(ParametricMap& f, const Tolerances& tol) {
    const int n = static_cast<int>(f.samples.size());
    const bool circle = f.boundary.domain() == Boundary::Domain::Circle;
    f.marks.clear();
    int pairs = circle ? n : n - 1;
    for (int i = 0; i < pairs; ++i) {
        const MapSample& a = f.samples[i];
        const MapSample& b = f.samples[(i + 1) % n];
        if (a.status != b.status) {
            f.marks.push_back(i);
            continue;
        }
        if (a.status != MapStatus::Defined) continue;
        double spacing = f.boundary.param_distance(a.s, b.s);
        if (f.boundary.param_distance(a.value, b.value) > tol.jump_factor * spacing)
            f.marks.push_back(i);
    }
    f.near_discontinuity.assign(n, false);
    for (int m : f.marks)
        for (int d = -(tol.discontinuity_collar - 1); d <= tol.discontinuity_collar; ++d) {
            int j = m + d;
            if (circle)
                j = ((j % n) + n) % n;
            else if (j < 0 || j >= n)
                continue;
            f.near_discontinuity[j] = true;
        }
}

ParametricMap sample_map(const Flow& flow, const BoundedRegion& br, int n, double horizon,
                         const Tolerances& tol, bool return_map) {
    ParametricMap f;
    f.boundary = br.boundary;
    f.horizon = horizon;
    std::vector<double> params = uniform_params(br.boundary, n);
    f.samples.resize(params.size());
    parallel_for(params.size(), [&](std::size_t i) {
        double s = params[i];
        Vec2 x = br.boundary.at(s);
        ExitOutcome out = return_map ? first_in(flow, br.region, x, horizon, tol)
                                     : exit_time(flow, br.region, x, horizon, tol);
        MapSample m;
        m.s = s;
        m.status = out.status;
        m.time = out.time;
        m.grazes = out.grazes;
        m.note = out.note;
        if (out.status == MapStatus::Defined) {
            if (out.time == 0.0) {
                m.value = s;
            } else if (auto v = br.boundary.param_of(out.point)) {
                m.value = *v;
            } else {
                m.status = MapStatus::Unresolved;
                m.note = "image point too far from the boundary curve";
            }
        }
        f.samples[i] = m;
    });
    annotate_discontinuities(f, tol);
    return f;
}

} // namespace

ParametricMap sample_exit_map(const Flow& flow, const BoundedRegion& br, int n, double horizon,
                              const Tolerances& tol) {
    return sample_map(flow, br, n, horizon, tol, false);
}

ParametricMap sample_return_map(const Flow& flow, const BoundedRegion& br, int n, double horizon,
                                const Tolerances& tol) {
    return sample_map(flow, br, n, horizon, tol, true);
}

TypeSequence run_length_encode(std::vector<BoundaryType> labels, std::vector<double> params,
                               bool cyclic, double horizon) {
    TypeSequence seq;
    seq.labels = std::move(labels);
    seq.params = std::move(params);
    seq.cyclic = cyclic;
    seq.horizon = horizon;
    const int n = static_cast<int>(seq.labels.size());
    for (int i = 0; i < n;) {
        int j = i;
        while (j + 1 < n && seq.labels[j + 1] == seq.labels[i]) ++j;
        seq.runs.push_back({i, j, seq.params[i], seq.params[j], seq.labels[i]});
        i = j + 1;
    }
    return seq;
}

TypeSequence type_sequence(const Flow& flow, const BoundedRegion& br, int n, double horizon,
                           const Tolerances& tol) {
    std::vector<double> params = uniform_params(br.boundary, n);
    std::vector<BoundaryType> labels(params.size());
    parallel_for(params.size(), [&](std::size_t i) {
        labels[i] =
            classify_boundary_point(flow, br.region, br.boundary.at(params[i]), horizon, tol).type;
    });
    return run_length_encode(std::move(labels), std::move(params),
                             br.boundary.domain() == Boundary::Domain::Circle, horizon);
}

// ---------------------------------------------------------------------------

CheckResult check_forbidden_bc(const TypeSequence& seq) {
    CheckResult res;
    if (seq.runs.empty()) return res;
    res.verdict = CheckVerdict::Pass;

    auto is_bc_pair = [](BoundaryType a, BoundaryType b) {
        return (a == BoundaryType::B && b == BoundaryType::C) ||
               (a == BoundaryType::C && b == BoundaryType::B);
    };
    const int r = static_cast<int>(seq.runs.size());
    int pairs = seq.cyclic && r > 1 ? r : r - 1;
    for (int i = 0; i < pairs; ++i) {
        const TypeRun& a = seq.runs[i];
        const TypeRun& b = seq.runs[(i + 1) % r];
        if (a.label == BoundaryType::Unresolved || b.label == BoundaryType::Unresolved) {
            if (res.verdict == CheckVerdict::Pass) res.verdict = CheckVerdict::Inconclusive;
            res.detail = "unresolved samples at a run junction";
            continue;
        }
        if (is_bc_pair(a.label, b.label) && a.length() >= 2 && b.length() >= 2) {
            res.verdict = CheckVerdict::Fail;
            res.violations.push_back({a.s_last, b.s_first, "B run abuts C run"});
        }
    }
    return res;
}

namespace {

bool fixed_sample(const MapSample& m, const Boundary& b, const Tolerances& tol) {
    return m.status == MapStatus::Defined && b.param_distance(m.value, m.s) <= tol.fixed_point;
}

} // namespace

CheckResult check_monotonicity(const ParametricMap& f, const Tolerances& tol) {
    CheckResult res;
    const auto& S = f.samples;
    const int n = static_cast<int>(S.size());
    if (n < 3) return res;

    int eligible = 0;
    auto defined = [&](int i) { return S[i].status == MapStatus::Defined; };

    // One-sided strict decrease around continuous non-fixed samples. A
    // neighbor t participates only inside the estimated delta-window: both
    // |t - s| and |F(t) - F(s)| must stay under |F(s) - s|, the bound the
    // monotonicity proof picks delta below. The image condition also screens
    // out jump discontinuities too small for the 10x marking rule.
    for (int j = 0; j < n; ++j) {
        if (!defined(j) || f.near_discontinuity[j] || fixed_sample(S[j], f.boundary, tol))
            continue;
        ++eligible;
        double window = f.boundary.param_distance(S[j].value, S[j].s);
        auto in_window = [&](int i) {
            return f.boundary.param_distance(S[i].s, S[j].s) < window &&
                   f.boundary.param_distance(S[i].value, S[j].value) < window;
        };
        for (int i = std::max(0, j - 2); i < j; ++i) {
            if (!defined(i) || f.near_discontinuity[i] || !in_window(i)) continue;
            if (!(S[i].value > S[j].value - tol.param))
                res.violations.push_back(
                    {S[i].s, S[j].s, "left neighbor must have larger image value"});
        }
        for (int k = j + 1; k <= std::min(n - 1, j + 2); ++k) {
            if (!defined(k) || f.near_discontinuity[k] || !in_window(k)) continue;
            if (!(S[k].value < S[j].value + tol.param))
                res.violations.push_back(
                    {S[j].s, S[k].s, "right neighbor must have smaller image value"});
        }
    }

    // interval trapping: s' strictly between s and F(s) keeps F(s') there too
    const double slack = tol.fixed_point;
    for (int i = 0; i < n; ++i) {
        if (!defined(i) || f.near_discontinuity[i]) continue;
        double lo = std::min(S[i].s, S[i].value) + slack;
        double hi = std::max(S[i].s, S[i].value) - slack;
        if (lo >= hi) continue;
        for (int j = 0; j < n; ++j) {
            if (j == i || !defined(j) || f.near_discontinuity[j]) continue;
            if (S[j].s <= lo || S[j].s >= hi) continue;
            if (S[j].value < lo - slack || S[j].value > hi + slack)
                res.violations.push_back({S[i].s, S[j].s, "image escapes the trapping interval"});
        }
    }

    if (!res.violations.empty()) {
        res.verdict = CheckVerdict::Fail;
    } else {
        res.verdict = CheckVerdict::Pass;
        if (eligible == 0) res.detail = "vacuous: no continuous non-fixed samples";
    }
    return res;
}

CheckResult check_extremum_count(const ParametricMap& f, const Tolerances& tol) {
    CheckResult res;
    if (!f.total()) {
        res.verdict = CheckVerdict::NotApplicable;
        res.detail = "map has undefined samples";
        return res;
    }
    const auto& S = f.samples;

    // plateau-merge equal consecutive values
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(S.size()); ++i)
        if (idx.empty() || std::abs(S[idx.back()].value - S[i].value) > tol.param) idx.push_back(i);

    int maxima = 0, minima = 0;
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        double prev = S[idx[k - 1]].value, cur = S[idx[k]].value, next = S[idx[k + 1]].value;
        bool is_max = cur > prev && cur > next;
        bool is_min = cur < prev && cur < next;
        if (!is_max && !is_min) continue;
        (is_max ? maxima : minima) += 1;
        const MapSample& m = S[idx[k]];
        if (!f.near_discontinuity[idx[k]] && !fixed_sample(m, f.boundary, tol))
            res.violations.push_back({m.s, m.value, "continuous interior extremum is not fixed"});
    }
    if (maxima > 1)
        res.violations.push_back(
            {0, 0, "more than one interior maximum (" + std::to_string(maxima) + ")"});
    if (minima > 1)
        res.violations.push_back(
            {0, 0, "more than one interior minimum (" + std::to_string(minima) + ")"});
    res.verdict = res.violations.empty() ? CheckVerdict::Pass : CheckVerdict::Fail;
    return res;
}

CheckResult check_two_to_one(const ParametricMap& f, const Tolerances& tol) {
    CheckResult res;
    std::vector<int> defined;
    for (int i = 0; i < static_cast<int>(f.samples.size()); ++i)
        if (f.samples[i].status == MapStatus::Defined) defined.push_back(i);
    if (defined.empty()) {
        res.verdict = CheckVerdict::NotApplicable;
        res.detail = "no defined samples";
        return res;
    }
    std::sort(defined.begin(), defined.end(),
              [&](int a, int b) { return f.samples[a].value < f.samples[b].value; });

    res.verdict = CheckVerdict::Pass;
    std::size_t g0 = 0;
    auto flush = [&](std::size_t g1) { // group [g0, g1) shares one merged value
        std::size_t size = g1 - g0;
        if (size >= 3) {
            res.violations.push_back({f.samples[defined[g0]].value, 0,
                                      "value with " + std::to_string(size) + " preimages"});
            res.verdict = CheckVerdict::Fail;
        } else if (size == 2) {
            bool any_fixed = fixed_sample(f.samples[defined[g0]], f.boundary, tol) ||
                             fixed_sample(f.samples[defined[g0 + 1]], f.boundary, tol);
            if (!any_fixed) {
                res.violations.push_back({f.samples[defined[g0]].s, f.samples[defined[g0 + 1]].s,
                                          "two preimages, neither fixed"});
                res.verdict = CheckVerdict::Fail;
            }
        }
        g0 = g1;
    };
    for (std::size_t i = 1; i < defined.size(); ++i)
        if (f.samples[defined[i]].value - f.samples[defined[i - 1]].value > tol.value_merge)
            flush(i);
    flush(defined.size());
    return res;
}

UnimodalNormalization unimodal_normalize(const ParametricMap& f, const Tolerances& tol) {
    UnimodalNormalization out;
    if (f.boundary.domain() != Boundary::Domain::Circle) {
        out.note = "line-parameter maps are not normalized";
        return out;
    }
    if (!f.total()) {
        out.note = "map has undefined samples";
        return out;
    }
    if (!f.marks.empty()) {
        out.note = "map has estimated discontinuities";
        return out;
    }
    out.applicable = true;

    // alpha = sup{s : F(s) > s} (0 for the empty set), beta = inf{s : F(s) < s}
    out.alpha = 0.0;
    out.beta = 1.0;
    bool above = false, below = false;
    for (const MapSample& m : f.samples) {
        if (m.value > m.s + tol.fixed_point) {
            above = true;
            out.alpha = std::max(out.alpha, m.s);
        }
        if (m.value < m.s - tol.fixed_point) {
            below = true;
            out.beta = std::min(out.beta, m.s);
        }
    }
    if (!above) out.alpha = 0.0;
    if (!below) out.beta = above ? 1.0 : 0.0; // identity map reports 0
    out.max_location = f.boundary.wrap(out.beta - out.alpha);

    auto wrap01 = [](double v) {
        double w = v - std::floor(v);
        return w >= 1.0 ? 0.0 : w;
    };
    out.normalized.reserve(f.samples.size());
    for (const MapSample& m : f.samples) {
        MapSample t = m;
        t.s = wrap01(m.s - out.alpha);
        t.value = wrap01(m.value - out.alpha);
        out.normalized.push_back(t);
    }
    std::sort(out.normalized.begin(), out.normalized.end(),
              [](const MapSample& a, const MapSample& b) { return a.s < b.s; });

    // unimodal: nondecreasing up to the peak, nonincreasing after
    const double eps = 1e-7;
    int peak = 0;
    for (int i = 1; i < static_cast<int>(out.normalized.size()); ++i)
        if (out.normalized[i].value > out.normalized[peak].value) peak = i;
    out.unimodal = true;
    for (int i = 1; i < static_cast<int>(out.normalized.size()); ++i) {
        double dv = out.normalized[i].value - out.normalized[i - 1].value;
        if (i <= peak ? dv < -eps : dv > eps) {
            out.unimodal = false;
            break;
        }
    }
    return out;
}

CheckResult check_junction_behavior(const Flow& flow, const BoundedRegion& br,
                                    const TypeSequence& seq, bool transversal_annotated,
                                    const Tolerances& tol) {
    CheckResult res;
    if (!transversal_annotated) {
        res.detail = "requires a transversality annotation";
        return res;
    }

    // consecutive major runs (>= 2 samples); minor runs between them are
    // treated as sampling noise when locating the junction
    std::vector<const TypeRun*> major;
    for (const TypeRun& r : seq.runs)
        if (r.length() >= 2) major.push_back(&r);
    if (major.size() < 2) {
        res.detail = "no junction between major runs";
        return res;
    }

    auto is_a1 = [](BoundaryType t) { return t == BoundaryType::A1; };
    auto is_a2c = [](BoundaryType t) { return t == BoundaryType::A2 || t == BoundaryType::C; };

    int tested = 0, skipped = 0;
    const int pairs = static_cast<int>(major.size()) - (seq.cyclic && major.size() > 1 ? 0 : 1);
    for (int i = 0; i < pairs; ++i) {
        const TypeRun& a = *major[i];
        const TypeRun& b = *major[(i + 1) % major.size()];
        bool a1_first = is_a1(a.label) && is_a2c(b.label);
        bool a1_second = is_a2c(a.label) && is_a1(b.label);
        if (!a1_first && !a1_second) continue;

        // refine the junction between the inner edges of the two runs by
        // bisecting the immediate-side predicate
        double lo = a.s_last, hi = b.s_first;
        auto enters = [&](double s) {
            return immediate_side(flow, br.region, br.boundary.at(s), tol) ==
                   ImmediateSide::Enters;
        };
        const bool lo_enters = !a1_first; // A-2/C side enters, A-1 side does not
        for (int it = 0; it < 60 && std::abs(hi - lo) > 1e-10; ++it) {
            double mid = 0.5 * (lo + hi);
            if (enters(mid) == lo_enters)
                lo = mid;
            else
                hi = mid;
        }
        double q = a1_first ? hi : lo; // land on the A-2/C side
        Vec2 cq = br.boundary.at(q);

        FlowEval probe = flow.at(tol.ladder_base, cq);
        if (probe.ok() && dist(probe.value, cq) <= 1e3 * tol.eval) {
            ++skipped;
            res.detail += "equilibrium junction near s=" + std::to_string(q) + " skipped; ";
            continue;
        }

        ++tested;
        double tau = tol.ladder_base;
        for (int k = 0; k < 7; ++k, tau *= 0.5) {
            for (double sgn : {+1.0, -1.0}) {
                FlowEval e = flow.at(sgn * tau, cq);
                if (!e.ok() || br.region.locate(e.value, tol.boundary) != Locate::Inside)
                    res.violations.push_back(
                        {q, sgn * tau, "one-sided orbit does not enter the open set"});
            }
        }
    }

    if (!res.violations.empty())
        res.verdict = CheckVerdict::Fail;
    else if (tested > 0)
        res.verdict = CheckVerdict::Pass;
    else if (skipped > 0)
        res.verdict = CheckVerdict::Inconclusive;
    else
        res.detail = "no A-1 | A-2/C junctions between major runs";
    return res;
}

} // namespace exitmap
