#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "exitmap/io_csv.hpp"
#include "exitmap/io_svg.hpp"
#include "exitmap/scenario.hpp"

using namespace exitmap;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string scenario_file;
    std::string builtin;
    std::string out_dir = ".";
    std::string tol_file;
    std::string format = "csv";
    int samples = 0;
    double horizon = 0.0;
    bool svg = false;
    unsigned seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--scenario", o.scenario_file, "scenario JSON file");
    cmd->add_option("--builtin", o.builtin, "builtin scenario name, e.g. exmap or affine(1)");
    cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--samples", o.samples, "boundary sample count override");
    cmd->add_option("--horizon", o.horizon, "certification horizon override");
    cmd->add_option("--tol-file", o.tol_file, "JSON file with tolerance overrides");
    cmd->add_option("--format", o.format, "table format: csv or json")->capture_default_str();
    cmd->add_flag("--svg", o.svg, "emit SVG plots next to the tables");
    cmd->add_option("--seed", o.seed, "seed for randomized property probes");
}

std::string sanitize(const std::string& name) {
    std::string s;
    for (char c : name)
        s += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
}

Scenario load_scenario(const CommonOpts& o) {
    if (o.scenario_file.empty() == o.builtin.empty())
        throw SchemaError("exactly one of --scenario or --builtin is required");
    Scenario sc;
    if (!o.builtin.empty()) {
        sc = builtin_scenario(o.builtin);
    } else {
        std::ifstream f(o.scenario_file);
        if (!f) throw SchemaError("cannot open scenario file: " + o.scenario_file);
        std::stringstream ss;
        ss << f.rdbuf();
        sc = scenario_from_json_text(ss.str());
    }
    if (o.samples > 0) sc.analysis.samples = o.samples;
    if (o.horizon > 0.0) {
        sc.analysis.horizon = o.horizon;
        sc.hybrid.horizon = o.horizon;
    }
    if (!o.tol_file.empty()) {
        std::ifstream f(o.tol_file);
        if (!f) throw SchemaError("cannot open tolerance file: " + o.tol_file);
        std::stringstream ss;
        ss << f.rdbuf();
        json j;
        try {
            j = json::parse(ss.str());
        } catch (const std::exception& e) {
            throw SchemaError(std::string("invalid tolerance JSON: ") + e.what());
        }
        auto set = [&](const char* key, double& slot) {
            if (j.contains(key)) slot = j[key].get<double>();
        };
        set("boundary", sc.tol.boundary);
        set("time", sc.tol.time);
        set("param", sc.tol.param);
        set("fixed_point", sc.tol.fixed_point);
        set("value_merge", sc.tol.value_merge);
        set("march_dt", sc.tol.march_dt);
        set("integ_rel", sc.tol.integ_rel);
        set("integ_abs", sc.tol.integ_abs);
    }
    fs::create_directories(o.out_dir);
    return sc;
}

std::string out_path(const CommonOpts& o, const Scenario& sc, const std::string& what,
                     const std::string& ext) {
    return (fs::path(o.out_dir) / (sanitize(sc.name) + "_" + what + "." + ext)).string();
}

// unified result row: s, status, T, exit_s, type_label, horizon, graze_count
void map_table(CsvWriter& w, const ParametricMap& f, const std::vector<std::string>& labels) {
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        const MapSample& m = f.samples[i];
        w.add_row({CsvWriter::num(m.s), to_string(m.status), CsvWriter::num(m.time),
                   m.status == MapStatus::Defined ? CsvWriter::num(m.value) : "",
                   labels.empty() ? "" : labels[i], CsvWriter::num(f.horizon),
                   CsvWriter::num(m.grazes)});
    }
}

json map_json(const ParametricMap& f, const std::vector<std::string>& labels) {
    json rows = json::array();
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        const MapSample& m = f.samples[i];
        json r{{"s", m.s},
               {"status", to_string(m.status)},
               {"T", m.time},
               {"horizon", f.horizon},
               {"grazes", m.grazes}};
        if (m.status == MapStatus::Defined) r["exit_s"] = m.value;
        if (!labels.empty()) r["type"] = labels[i];
        rows.push_back(r);
    }
    return rows;
}

void write_map(const CommonOpts& o, const Scenario& sc, const ParametricMap& f,
               const std::vector<std::string>& labels, const std::string& what) {
    if (o.format == "json") {
        std::ofstream out(out_path(o, sc, what, "json"));
        out << map_json(f, labels).dump(2) << "\n";
        return;
    }
    CsvWriter w({"s", "status", "T", "exit_s", "type_label", "horizon", "graze_count"});
    map_table(w, f, labels);
    w.write(out_path(o, sc, what, "csv"));
}

void svg_map_plot(const CommonOpts& o, const Scenario& sc, const ParametricMap& fe,
                  const ParametricMap& fr) {
    double lo = fe.boundary.lo(), hi = fe.boundary.hi();
    SvgPlot plot(lo, hi, lo, hi);
    plot.axes();
    auto points = [&](const ParametricMap& f, MapStatus st) {
        std::vector<Vec2> pts;
        for (const MapSample& m : f.samples)
            if (m.status == st) pts.push_back({m.s, st == MapStatus::Defined ? m.value : lo});
        return pts;
    };
    plot.scatter(points(fe, MapStatus::Defined), "#1f77b4", 2.0);
    plot.scatter(points(fr, MapStatus::Defined), "#ff7f0e", 2.0);
    plot.scatter(points(fe, MapStatus::Unresolved), "#d62728", 3.0);
    plot.text({lo + 0.02 * (hi - lo), hi - 0.05 * (hi - lo)},
              "first-out (blue), first-in (orange)");
    plot.write(out_path(o, sc, "exitmap", "svg"));
}

const char* type_color(BoundaryType t) {
    switch (t) {
        case BoundaryType::A1: return "#2ca02c";
        case BoundaryType::A2: return "#1f77b4";
        case BoundaryType::A3: return "#9467bd";
        case BoundaryType::B: return "#ff7f0e";
        case BoundaryType::C: return "#d62728";
        case BoundaryType::Unresolved: return "#7f7f7f";
    }
    return "#000";
}

void svg_typeseq_plot(const CommonOpts& o, const Scenario& sc, const TypeSequence& seq) {
    const Boundary& b = sc.region->boundary;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    std::vector<Vec2> pts;
    for (double s : seq.params) {
        Vec2 p = b.at(s);
        pts.push_back(p);
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    double pad = 0.1 * std::max(xhi - xlo, yhi - ylo) + 1e-9;
    SvgPlot plot(xlo - pad, xhi + pad, ylo - pad, yhi + pad);
    for (std::size_t i = 0; i < pts.size(); ++i)
        plot.scatter({pts[i]}, type_color(seq.labels[i]), 2.5);
    plot.write(out_path(o, sc, "typeseq", "svg"));
}

int cmd_exitmap(const CommonOpts& o) {
    Scenario sc = load_scenario(o);
    if (!sc.region) throw SchemaError("scenario has no region to analyze");
    ParametricMap fe =
        sample_exit_map(sc.flow, *sc.region, sc.analysis.samples, sc.analysis.horizon, sc.tol);
    ParametricMap fr =
        sample_return_map(sc.flow, *sc.region, sc.analysis.samples, sc.analysis.horizon, sc.tol);
    write_map(o, sc, fe, {}, "exitmap");
    write_map(o, sc, fr, {}, "returnmap");
    if (o.svg) svg_map_plot(o, sc, fe, fr);
    int defined = 0, undefined = 0, unresolved = 0;
    for (const MapSample& m : fe.samples)
        (m.status == MapStatus::Defined
             ? defined
             : m.status == MapStatus::Undefined ? undefined : unresolved)++;
    std::printf("%s: %d samples (first-out: %d defined, %d undefined, %d unresolved)\n",
                sc.name.c_str(), sc.analysis.samples, defined, undefined, unresolved);
    return 0;
}

int cmd_classify(const CommonOpts& o) {
    Scenario sc = load_scenario(o);
    if (!sc.region) throw SchemaError("scenario has no region to analyze");
    ParametricMap fe =
        sample_exit_map(sc.flow, *sc.region, sc.analysis.samples, sc.analysis.horizon, sc.tol);
    std::vector<std::string> labels;
    int counts[6] = {};
    for (const MapSample& m : fe.samples) {
        Classification c =
            classify_boundary_point(sc.flow, sc.region->region, sc.region->boundary.at(m.s),
                                    sc.analysis.horizon, sc.tol);
        labels.push_back(to_string(c.type));
        counts[static_cast<int>(c.type)]++;
    }
    write_map(o, sc, fe, labels, "classify");
    std::printf("%s: A-1 %d, A-2 %d, A-3 %d, B %d, C %d, unresolved %d\n", sc.name.c_str(),
                counts[0], counts[1], counts[2], counts[3], counts[4], counts[5]);
    return 0;
}

int cmd_typeseq(const CommonOpts& o) {
    Scenario sc = load_scenario(o);
    if (!sc.region) throw SchemaError("scenario has no region to analyze");
    TypeSequence seq =
        type_sequence(sc.flow, *sc.region, sc.analysis.samples, sc.analysis.horizon, sc.tol);
    CsvWriter w({"run", "s_first", "s_last", "label", "samples"});
    for (std::size_t i = 0; i < seq.runs.size(); ++i) {
        const TypeRun& r = seq.runs[i];
        w.add_row({CsvWriter::num(static_cast<int>(i)), CsvWriter::num(r.s_first),
                   CsvWriter::num(r.s_last), to_string(r.label), CsvWriter::num(r.length())});
        std::printf("run %2zu: [%.6f, %.6f]  %s (%d samples)\n", i, r.s_first, r.s_last,
                    to_string(r.label), r.length());
    }
    w.write(out_path(o, sc, "typeseq", "csv"));
    if (o.svg) svg_typeseq_plot(o, sc, seq);
    return 0;
}

int cmd_check(const CommonOpts& o, bool all_builtins) {
    std::vector<Scenario> scenarios;
    if (all_builtins) {
        for (const char* name :
             {"exmap", "affine(1)", "affine(0)", "affine(-1)", "source", "sink", "rotation",
              "bouncing_ball(0.5)", "impact_oscillator(1)", "zeno_shear", "cooling",
              "realize_neg", "realize_square", "realize_disc(1/2)", "realize_disc(1/3)"})
            scenarios.push_back(builtin_scenario(name));
    } else {
        scenarios.push_back(load_scenario(o));
    }

    bool all_pass = true;
    CsvWriter w({"scenario", "check", "verdict", "detail"});
    for (const Scenario& sc : scenarios) {
        SuiteReport rep = run_property_suite(sc, o.seed);
        for (const SuiteRow& row : rep.rows) {
            std::printf("%-24s %-16s %-14s %s\n", sc.name.c_str(), row.check.c_str(),
                        to_string(row.verdict), row.detail.c_str());
            w.add_row({sc.name, row.check, to_string(row.verdict), row.detail});
        }
        all_pass = all_pass && rep.passed;
    }
    for (const SuiteReport& rep : negative_control_reports()) {
        for (const SuiteRow& row : rep.rows) {
            bool expected_fail = row.verdict == CheckVerdict::Fail;
            std::printf("%-24s %-16s %-14s %s\n", rep.scenario.c_str(), row.check.c_str(),
                        expected_fail ? "fail (expected)" : "UNEXPECTED PASS",
                        row.detail.c_str());
            w.add_row({rep.scenario, row.check, to_string(row.verdict), "negative control"});
            all_pass = all_pass && expected_fail;
        }
    }
    fs::create_directories(o.out_dir);
    w.write((fs::path(o.out_dir) / "check_matrix.csv").string());
    std::printf("property suite: %s\n", all_pass ? "pass" : "FAIL");
    return all_pass ? 0 : 1;
}

int cmd_realize(const CommonOpts& o) {
    Scenario sc = load_scenario(o);
    if (sc.kind != ScenarioKind::Realization)
        throw SchemaError("realize needs a realization scenario");
    CsvWriter w({"x_or_s", "status", "T", "image", "error"});
    if (sc.realize_line) {
        HalfplaneRealization rf = build_halfplane_realization(*sc.realize_line, sc.tol);
        RealizationReport rep =
            verify_realization(rf, sc.verify_samples, sc.analysis.horizon, sc.tol);
        for (const auto& r : rep.rows)
            w.add_row({CsvWriter::num(r.x), to_string(r.status), CsvWriter::num(r.time),
                       CsvWriter::num(rf.P(r.x)), CsvWriter::num(r.error)});
        w.write(out_path(o, sc, "realize", "csv"));
        std::printf("%s: max point error %.3e, max exit-time error %.3e, %d unresolved\n",
                    sc.name.c_str(), rep.max_point_error, rep.max_time_error, rep.undefined);
        return 0;
    }
    // disc realization round trip; the printed note records the reading of the
    // circle-map hypotheses this build follows
    std::printf("circle-map reading: identity on [0, alpha], continuous and unimodal with the "
                "maximum at alpha, decreasing to 0 at the wrap\n");
    DiscRealization dr = build_disc_realization(*sc.realize_circle, sc.tol);
    BoundedRegion disc = make_disc({0, 0}, 1.0);
    ParametricMap F =
        sample_exit_map(dr.flow, disc, sc.analysis.samples, sc.analysis.horizon, sc.tol);
    double worst = 0.0;
    for (const MapSample& m : F.samples) {
        double want = dr.spec.P(m.s);
        double err =
            m.status == MapStatus::Defined ? F.boundary.param_distance(m.value, want) : 1.0;
        worst = std::max(worst, err);
        w.add_row({CsvWriter::num(m.s), to_string(m.status), CsvWriter::num(m.time),
                   CsvWriter::num(want), CsvWriter::num(err)});
    }
    w.write(out_path(o, sc, "realize", "csv"));
    std::printf("%s: max round-trip error %.3e at %d samples\n", sc.name.c_str(), worst,
                sc.analysis.samples);
    return 0;
}

int cmd_hybrid(const CommonOpts& o) {
    Scenario sc = load_scenario(o);

    if (sc.kind == ScenarioKind::Cooling) {
        CoolingResult res = cooling_return_time(*sc.cooling, sc.analysis.horizon, sc.tol);
        if (!res.exits) {
            std::printf("%s: %s\n", sc.name.c_str(), res.note.c_str());
            return 0;
        }
        std::printf("%s: exit %.6f, return %.6f, total %.6f\n", sc.name.c_str(), res.exit_time,
                    res.return_time, res.total_time);
        CsvWriter w({"exit_time", "return_time", "total_time"});
        w.add_row({CsvWriter::num(res.exit_time), CsvWriter::num(res.return_time),
                   CsvWriter::num(res.total_time)});
        w.write(out_path(o, sc, "cooling", "csv"));
        return 0;
    }

    if (sc.kind == ScenarioKind::Induced) {
        InducedResult res = induced_system(sc.induced->flow1, sc.induced->flow2, sc.induced->lo,
                                           sc.induced->hi, sc.induced->n, sc.induced->horizon,
                                           sc.tol);
        std::printf("%s: %s\n", sc.name.c_str(), res.report.c_str());
        CsvWriter w({"x", "status", "value"});
        for (const MapSample& m : res.reset_samples.samples)
            w.add_row({CsvWriter::num(m.s), to_string(m.status),
                       m.status == MapStatus::Defined ? CsvWriter::num(m.value) : ""});
        w.write(out_path(o, sc, "induced", "csv"));
        return 0;
    }

    if (sc.kind != ScenarioKind::Hybrid || !sc.system)
        throw SchemaError("hybrid needs a hybrid, cooling, or induced scenario");

    HybridConfig cfg;
    cfg.tol = sc.tol;
    cfg.policy = sc.hybrid.policy;
    HybridTrajectory traj =
        simulate(*sc.system, sc.hybrid.x0, sc.hybrid.horizon, sc.hybrid.max_events, cfg);
    ZenoReport zeno = detect_zeno(traj, cfg);

    CsvWriter w({"n", "t", "x", "y", "mode"});
    for (const HybridSegment& seg : traj.segments)
        for (const auto& [t, p] : seg.path)
            w.add_row({CsvWriter::num(seg.index), CsvWriter::num(t), CsvWriter::num(p.x),
                       CsvWriter::num(p.y),
                       seg.mode == HybridMode::Sliding ? "sliding" : "flow"});
    w.write(out_path(o, sc, "trajectory", "csv"));

    CsvWriter jw({"n", "t", "pre_x", "pre_y", "post_x", "post_y"});
    for (const JumpRecord& j : traj.jumps)
        jw.add_row({CsvWriter::num(j.index), CsvWriter::num(j.t), CsvWriter::num(j.pre.x),
                    CsvWriter::num(j.pre.y), CsvWriter::num(j.post.x),
                    CsvWriter::num(j.post.y)});
    jw.write(out_path(o, sc, "jumps", "csv"));

    if (o.svg) {
        double xlo = 1e300, xhi = -1e300, ylo = 0.0, yhi = -1e300;
        std::vector<Vec2> pts;
        for (const HybridSegment& seg : traj.segments)
            for (const auto& [t, p] : seg.path) {
                pts.push_back(p);
                xlo = std::min(xlo, p.x);
                xhi = std::max(xhi, p.x);
                ylo = std::min(ylo, p.y);
                yhi = std::max(yhi, p.y);
            }
        SvgPlot plot(xlo - 0.1, xhi + 0.1, ylo - 0.1, yhi + 0.1);
        plot.axes();
        plot.polyline(pts, "#1f77b4", 1.0);
        plot.write(out_path(o, sc, "trajectory", "svg"));
    }

    std::printf("%s: %zu segments, %zu jumps, termination %s, policy %s\n", sc.name.c_str(),
                traj.segments.size(), traj.jumps.size(), to_string(traj.termination),
                to_string(traj.policy));
    std::printf("zeno: %s", to_string(zeno.verdict));
    if (zeno.verdict == ZenoVerdict::Zeno)
        std::printf(", accumulation time %.6f", zeno.accumulation_time);
    if (!zeno.note.empty()) std::printf(" (%s)", zeno.note.c_str());
    std::printf("\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-out/first-in map toolkit for planar flows"};
    app.require_subcommand(1);

    CommonOpts o;
    bool check_all = false;

    CLI::App* c_exitmap = app.add_subcommand("exitmap", "sample the first-out and first-in maps");
    add_common(c_exitmap, o);
    CLI::App* c_classify = app.add_subcommand("classify", "five-type boundary classification");
    add_common(c_classify, o);
    CLI::App* c_typeseq = app.add_subcommand("typeseq", "run-length encoded type sequence");
    add_common(c_typeseq, o);
    CLI::App* c_check = app.add_subcommand("check", "structural property suite");
    add_common(c_check, o);
    c_check->add_flag("--all", check_all, "run the suite over every builtin scenario");
    CLI::App* c_realize = app.add_subcommand("realize", "build and verify a prescribed exit map");
    add_common(c_realize, o);
    CLI::App* c_hybrid = app.add_subcommand("hybrid", "simulate an impacting system");
    add_common(c_hybrid, o);
    CLI::App* c_list = app.add_subcommand("list", "list builtin scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_list->parsed()) {
            for (const std::string& n : builtin_names()) std::printf("%s\n", n.c_str());
            return 0;
        }
        if (c_exitmap->parsed()) return cmd_exitmap(o);
        if (c_classify->parsed()) return cmd_classify(o);
        if (c_typeseq->parsed()) return cmd_typeseq(o);
        if (c_check->parsed()) return cmd_check(o, check_all);
        if (c_realize->parsed()) return cmd_realize(o);
        if (c_hybrid->parsed()) return cmd_hybrid(o);
    } catch (const SchemaError& e) {
        json err{{"error", {{"kind", "schema"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err{{"error", {{"kind", "computation"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
