#include "perifix/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "perifix/certify.hpp"
#include "perifix/config.hpp"
#include "perifix/errors.hpp"
#include "perifix/genereg.hpp"
#include "perifix/parallel.hpp"
#include "perifix/poincare.hpp"

namespace perifix::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CheckFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::string model;
    double rtol = 1e-9;
    double atol = 1e-12;
    double max_step = 0.0;  // 0: tau / 100
    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;
};

void add_common(CLI::App* app, CommonFlags& c, bool needs_model) {
    auto* m = app->add_option("--model", c.model, "Model document (JSON)");
    if (needs_model) m->required();
    app->add_option("--rtol", c.rtol, "Relative tolerance")->check(CLI::PositiveNumber);
    app->add_option("--atol", c.atol, "Absolute tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-step", c.max_step, "Largest step (default period/100)")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", c.seed, "Sampling seed");
    app->add_option("--threads", c.threads, "OpenMP threads (default: runtime choice)");
}

IntegratorSettings settings_for(double tau, const CommonFlags& c) {
    IntegratorSettings s;
    s.rtol = c.rtol;
    s.atol = c.atol;
    s.max_step = c.max_step > 0 ? c.max_step : tau / 100.0;
    return s;
}

Vec parse_vector(const std::string& text, const char* flag, std::size_t expected) {
    Vec v;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        std::string item = text.substr(start, end - start);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        double x = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
            throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
        v.push_back(x);
        start = end + 1;
    }
    if (v.size() != expected)
        throw UsageError(std::string(flag) + ": expected " + std::to_string(expected) + " comma-separated values, got " +
                         std::to_string(v.size()));
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("", "cannot open model file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct LoadedModel {
    std::string text;
    ModelDocument doc;
};

LoadedModel load(const std::string& path) {
    std::string text = read_file(path);
    try {
        return LoadedModel{text, load_model_text(text)};
    } catch (const ModelError& e) {
        throw ModelError("", path + ": " + e.what());
    }
}

class OutputFiles {
public:
    void write(const std::filesystem::path& path, const std::string& content) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (f) f << content;
        if (f) f.flush();
        if (!f) {
            std::string msg = "cannot write " + path.string();
            if (!written_.empty()) {
                msg += "; partial files:";
                for (const auto& w : written_) msg += " " + w;
            }
            throw IoError(msg);
        }
        written_.push_back(path.string());
    }

    // "-" or empty writes to `out` instead of a file.
    void emit(const std::string& path, const std::string& content, std::ostream& out) {
        if (path.empty() || path == "-") out << content;
        else write(path, content);
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    std::vector<std::string> written_;
};

std::string trajectory_csv(const Trajectory& tr) {
    std::string s = "t";
    const std::size_t n = tr.states.empty() ? 0 : tr.states.front().size();
    for (std::size_t i = 0; i < n; ++i) s += ",x" + std::to_string(i + 1);
    s += '\n';
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        s += format_csv_number(tr.times[k]);
        for (double v : tr.states[k]) s += "," + format_csv_number(v);
        s += '\n';
    }
    return s;
}

std::string orbit_csv(const Orbit& orbit) {
    std::string s = "k";
    const std::size_t n = orbit.points.front().size();
    for (std::size_t i = 0; i < n; ++i) s += ",x" + std::to_string(i + 1);
    s += ",residual\n";
    for (std::size_t k = 0; k < orbit.points.size(); ++k) {
        s += std::to_string(k);
        for (double v : orbit.points[k]) s += "," + format_csv_number(v);
        s += ",";
        if (k > 0) s += format_csv_number(orbit.residuals[k - 1]);
        s += '\n';
    }
    return s;
}

struct CertifyOptions {
    std::optional<Vec> x0;
    std::optional<Vec> y0;
    int samples = 256;
    int time_samples = 64;
    int face_samples = 128;
    double tol = 1e-6;
    double residual_tol = 1e-8;
    int max_iters = 500;
    std::uint64_t seed = 0;
    IntegratorSettings solver;
};

RunReport run_certification(const ModelDocument& doc, const CertifyOptions& o) {
    const ClosedLoopModel& mdl = doc.model;
    RunReport rep;
    rep.command = "certify";
    rep.model_type = doc.type;
    rep.solver = o.solver;
    rep.seed = o.seed;

    rep.checks.push_back(check_A1_quasimonotone(mdl, o.samples, o.seed));
    rep.checks.push_back(check_A2_input_monotone(mdl, o.samples, o.seed));
    rep.checks.push_back(check_A3_output_decreasing(mdl, o.samples, o.seed));
    rep.checks.push_back(verify_box_invariance(mdl, mdl.state_box(), o.time_samples, o.face_samples, o.seed));

    const Vec x0 = o.x0.value_or(mdl.state_box().lo());
    const Vec y0 = o.y0.value_or(mdl.state_box().hi());
    const DoubledModel dm = build_doubled(mdl);
    CheckResult bracket = check_bracket_condition(dm, x0, y0, o.solver);
    const bool bracket_ok = bracket.passed();
    rep.checks.push_back(std::move(bracket));

    bool h_ok = false;
    if (doc.gene) {
        rep.checks.push_back(check_H(*doc.gene));
        h_ok = rep.checks.back().passed();
    }

    if (mdl.n() >= 2) {
        try {
            rep.feedback = classify_cyclic(mdl, 64, o.seed);
        } catch (const StructureError& e) {
            rep.feedback_error = e.what();
        }
    }

    rep.extra["bracket"] = {{"x0", x0}, {"y0", y0}};
    if (bracket_ok) {
        ConvergenceCertificate cert = bracket_converge(dm, x0, y0, o.tol, o.residual_tol, o.max_iters, o.solver);
        if (cert.status == CertificateStatus::Converged) {
            if (h_ok) cert.uniqueness = "H";
            try {
                const Trajectory loop = periodic_solution(mdl, cert.r, 100, cert.fixed_point_residual, o.solver);
                rep.extra["periodic_solution"] = {{"samples_per_period", 100},
                                                  {"closure_defect", sup_distance(loop.states.back(), cert.r)}};
            } catch (const NumericalError& e) {
                rep.extra["periodic_solution"] = {{"error", e.what()}};
            }
        }
        rep.certificate = std::move(cert);
    } else {
        rep.extra["certificate_skipped"] = "bracket condition did not pass";
    }
    return rep;
}

bool all_passed(const RunReport& rep) {
    for (const auto& c : rep.checks)
        if (!c.passed()) return false;
    return rep.certificate && rep.certificate->status == CertificateStatus::Converged;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_simulate(const CommonFlags& c, const std::string& x0_text, double t0, double t_end, double dt, std::ostream& out) {
    const LoadedModel lm = load(c.model);
    const auto& mdl = lm.doc.model;
    const Vec x0 = parse_vector(x0_text, "--x0", mdl.n());
    if (!(t_end >= t0)) throw UsageError("--t-end must not precede --t0");
    const Vec grid = uniform_grid(t0, t_end, dt);
    const Trajectory tr = sample_trajectory(mdl.field(), t0, x0, grid, settings_for(mdl.period(), c));
    OutputFiles files;
    files.emit(c.out, trajectory_csv(tr), out);
    return kOk;
}

int cmd_orbit(const CommonFlags& c, const std::string& x0_text, int iterations, std::ostream& out) {
    const LoadedModel lm = load(c.model);
    const auto& mdl = lm.doc.model;
    const Vec x0 = parse_vector(x0_text, "--x0", mdl.n());
    const Orbit orbit = iterate_orbit(mdl, x0, iterations, settings_for(mdl.period(), c));
    OutputFiles files;
    files.emit(c.out, orbit_csv(orbit), out);
    return kOk;
}

int cmd_certify(const CommonFlags& c, CertifyOptions o, const std::string& x0_text, const std::string& y0_text,
                bool strict, std::ostream& out, std::ostream& err) {
    const LoadedModel lm = load(c.model);
    const auto& mdl = lm.doc.model;
    if (!x0_text.empty()) o.x0 = parse_vector(x0_text, "--x0", mdl.n());
    if (!y0_text.empty()) o.y0 = parse_vector(y0_text, "--y0", mdl.n());
    o.seed = c.seed;
    o.solver = settings_for(mdl.period(), c);
    RunReport rep = run_certification(lm.doc, o);
    rep.model_digest = content_digest(lm.text);
    if (!c.out.empty() && c.out != "-") rep.files.push_back(c.out);
    OutputFiles files;
    files.emit(c.out, dump(to_json(rep)), out);
    const bool ok = all_passed(rep);
    if (!ok) err << "perifix: certify: not every check passed\n";
    if (strict && !ok) throw CheckFailure("certification failed (strict mode)");
    return kOk;
}

std::string gnuplot_3d() {
    return "set datafile separator ','\n"
           "set terminal pngcairo size 900,700\n"
           "set output 'fig2.png'\n"
           "set xlabel 'x1'\nset ylabel 'x2'\nset zlabel 'x3'\n"
           "splot for [k=0:4] 'fig2.csv' skip 1 using ($1==k ? $3 : NaN):4:5 with lines title sprintf('k=%d', k)\n";
}

std::string gnuplot_series(int fig, int component) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set terminal pngcairo size 900,500\n"
      << "set output 'fig" << fig << ".png'\n"
      << "set xlabel 't'\nset ylabel 'x" << component << "'\n"
      << "plot for [k=0:4] 'fig" << fig << ".csv' skip 1 using 1:(column(k+2)) with lines title sprintf('k=%d', k)\n";
    return s.str();
}

int cmd_reproduce(const CommonFlags& c, const std::string& outdir, std::ostream& out, std::ostream& err) {
    ReproduceOptions o;
    o.outdir = outdir;
    o.solver.rtol = c.rtol;
    o.solver.atol = c.atol;
    if (c.max_step > 0) o.solver.max_step = c.max_step;
    o.seed = c.seed;
    const ReproduceResult res = reproduce_paper(o);
    out << "max pairwise distance at t=5j (j>=40): " << res.max_pairwise_distance << "\n"
        << "max |x(t+5) - x(t)| on [150,195]:      " << res.max_period_defect << "\n"
        << "certificate r vs trajectories:          " << res.certificate_orbit_distance << "\n";
    if (!res.passed) {
        err << "perifix: reproduce-paper: common-limit assertion failed\n";
        throw CheckFailure("reproduce-paper assertions failed");
    }
    return kOk;
}

}  // namespace

std::string reference_model_document() {
    const json doc = {{"type", "gene"},
                      {"n", 3},
                      {"period", 5.0},
                      {"alpha", {"2", "1", "2 - (4/5)*sin(2*pi*t/5)"}},
                      {"g", "2/(1+u)"}};
    return doc.dump(2) + "\n";
}

ReproduceResult reproduce_paper(const ReproduceOptions& opts) {
    std::error_code ec;
    std::filesystem::create_directories(opts.outdir, ec);
    if (ec) throw IoError("cannot create " + opts.outdir.string() + ": " + ec.message());

    const std::string doc_text = reference_model_document();
    const ModelDocument doc = load_model_text(doc_text);
    const ClosedLoopModel& mdl = doc.model;
    const double tau = mdl.period();
    IntegratorSettings s = opts.solver;
    if (!std::isfinite(s.max_step)) s.max_step = tau / 100.0;

    std::vector<Vec> starts;
    for (int k = 0; k <= 4; ++k) starts.push_back({k / 4.0, k / 4.0, 5.0 * k / 24.0});
    const Vec grid = uniform_grid(0.0, opts.t_end, opts.dt);
    const std::vector<Trajectory> trs = trajectory_batch(mdl.field(), 0.0, starts, grid, s);

    auto index_of = [&](double t) { return static_cast<std::size_t>(std::llround(t / opts.dt)); };
    const std::size_t per = index_of(tau);

    ReproduceResult res;
    for (std::size_t j = 40; j * per < grid.size(); ++j)
        for (std::size_t a = 0; a < trs.size(); ++a)
            for (std::size_t b = a + 1; b < trs.size(); ++b)
                res.max_pairwise_distance =
                    std::max(res.max_pairwise_distance, sup_distance(trs[a].states[j * per], trs[b].states[j * per]));
    for (const auto& tr : trs)
        for (std::size_t i = index_of(150.0); i <= index_of(195.0) && i + per < tr.states.size(); ++i)
            res.max_period_defect = std::max(res.max_period_defect, sup_distance(tr.states[i + per], tr.states[i]));

    CertifyOptions co;
    co.seed = opts.seed;
    co.solver = s;
    RunReport cert_rep = run_certification(doc, co);
    cert_rep.model_digest = content_digest(doc_text);

    const bool converged = cert_rep.certificate && cert_rep.certificate->status == CertificateStatus::Converged;
    res.certificate_orbit_distance = std::numeric_limits<double>::infinity();
    if (converged) {
        res.certificate_orbit_distance = 0.0;
        const Vec& r = cert_rep.certificate->r;
        for (std::size_t j = 40; j * per < grid.size(); ++j)
            for (const auto& tr : trs)
                res.certificate_orbit_distance = std::max(res.certificate_orbit_distance, sup_distance(r, tr.states[j * per]));
    }
    res.passed = res.max_pairwise_distance < 1e-3 && res.max_period_defect < 1e-3 && converged &&
                 res.certificate_orbit_distance < 1e-3;

    OutputFiles files;
    const auto dir = opts.outdir;
    files.write(dir / "model.json", doc_text);

    std::string fig2 = "k,t,x1,x2,x3\n";
    for (std::size_t k = 0; k < trs.size(); ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            fig2 += std::to_string(k) + "," + format_csv_number(grid[i]);
            for (double v : trs[k].states[i]) fig2 += "," + format_csv_number(v);
            fig2 += '\n';
        }
    files.write(dir / "fig2.csv", fig2);
    files.write(dir / "fig2.gp", gnuplot_3d());
    for (int comp = 0; comp < 3; ++comp) {
        std::string csv = "t";
        for (std::size_t k = 0; k < trs.size(); ++k) csv += ",k" + std::to_string(k);
        csv += '\n';
        for (std::size_t i = 0; i < grid.size(); ++i) {
            csv += format_csv_number(grid[i]);
            for (const auto& tr : trs) csv += "," + format_csv_number(tr.states[i][static_cast<std::size_t>(comp)]);
            csv += '\n';
        }
        const int fig = 3 + comp;
        files.write(dir / ("fig" + std::to_string(fig) + ".csv"), csv);
        files.write(dir / ("fig" + std::to_string(fig) + ".gp"), gnuplot_series(fig, comp + 1));
    }
    cert_rep.files = {(dir / "certificate.json").string()};
    files.write(dir / "certificate.json", dump(to_json(cert_rep)));

    RunReport rep = cert_rep;
    rep.command = "reproduce-paper";
    rep.files = files.written();
    rep.files.push_back((dir / "report.json").string());
    rep.extra["reproduction"] = {{"t_end", opts.t_end},
                                 {"dt", opts.dt},
                                 {"initial_states", starts},
                                 {"max_pairwise_distance_period_multiples", res.max_pairwise_distance},
                                 {"max_period_defect_150_195", res.max_period_defect},
                                 {"certificate_orbit_distance", json_number(res.certificate_orbit_distance)},
                                 {"threshold", 1e-3},
                                 {"passed", res.passed}};
    files.write(dir / "report.json", dump(to_json(rep)));
    res.report = std::move(rep);
    return res;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Periodic negative-feedback systems: simulation and convergence certificates", "perifix"};
    app.require_subcommand(1, 1);

    CommonFlags common;
    std::string x0_text, y0_text, outdir;
    double t0 = 0.0, t_end = 0.0, dt = 0.0;
    int iterations = 40;
    bool strict = false;
    CertifyOptions copts;

    auto* sim = app.add_subcommand("simulate", "Sample one trajectory to CSV (t,x1..xn)");
    add_common(sim, common, true);
    sim->add_option("--x0", x0_text, "Initial state, comma separated")->required();
    sim->add_option("--t0", t0, "Start time");
    sim->add_option("--t-end", t_end, "End time")->required();
    sim->add_option("--dt", dt, "Sampling interval")->required()->check(CLI::PositiveNumber);
    sim->add_option("--out", common.out, "Output CSV (default stdout)");

    auto* orb = app.add_subcommand("orbit", "Period-map iterates to CSV (k,x1..xn,residual)");
    add_common(orb, common, true);
    orb->add_option("--x0", x0_text, "Initial state, comma separated")->required();
    orb->add_option("--iterations", iterations, "Number of period-map iterations")->check(CLI::NonNegativeNumber);
    orb->add_option("--out", common.out, "Output CSV (default stdout)");

    auto* cer = app.add_subcommand("certify", "Check hypotheses and run the bracketing iteration");
    add_common(cer, common, true);
    cer->add_option("--x0", x0_text, "Lower bracket corner (default: state box lo)");
    cer->add_option("--y0", y0_text, "Upper bracket corner (default: state box hi)");
    cer->add_option("--samples", copts.samples, "Samples per Jacobian sign check")->check(CLI::PositiveNumber);
    cer->add_option("--time-samples", copts.time_samples, "Times per face point (box invariance)")->check(CLI::PositiveNumber);
    cer->add_option("--face-samples", copts.face_samples, "Points per face (box invariance)")->check(CLI::PositiveNumber);
    cer->add_option("--tol", copts.tol, "Gap tolerance")->check(CLI::PositiveNumber);
    cer->add_option("--residual-tol", copts.residual_tol, "Fixed-point residual tolerance")->check(CLI::PositiveNumber);
    cer->add_option("--max-iters", copts.max_iters, "Maximum bracketing iterations")->check(CLI::NonNegativeNumber);
    cer->add_flag("--strict", strict, "Exit 3 when any check fails");
    cer->add_option("--out", common.out, "Report JSON (default stdout)");

    auto* rep = app.add_subcommand("reproduce-paper", "Gene example: five trajectories, figures, certificate");
    add_common(rep, common, false);
    rep->add_option("--outdir", outdir, "Output directory")->required();

    std::vector<std::string> argv_store{"perifix"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    set_threads(common.threads);
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "simulate") return cmd_simulate(common, x0_text, t0, t_end, dt, out);
        if (name == "orbit") return cmd_orbit(common, x0_text, iterations, out);
        if (name == "certify") return cmd_certify(common, copts, x0_text, y0_text, strict, out, err);
        return cmd_reproduce(common, outdir, out, err);
    } catch (const UsageError& e) {
        err << "perifix: " << name << ": " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        err << "perifix: " << name << ": " << e.what() << "\n";
        return kUsage;
    } catch (const ModelError& e) {
        err << "perifix: " << name << ": invalid model: " << e.what() << "\n";
        return kModelInvalid;
    } catch (const StructureError& e) {
        err << "perifix: " << name << ": invalid model: " << e.what() << "\n";
        return kModelInvalid;
    } catch (const CheckFailure& e) {
        err << "perifix: " << name << ": " << e.what() << "\n";
        return kCheckFailed;
    } catch (const IntegrationError& e) {
        err << "perifix: " << name << ": integration failed: " << e.what() << " (last good t=" << e.last_time() << ")\n";
        return kNumerical;
    } catch (const std::exception& e) {
        err << "perifix: " << name << ": " << e.what() << "\n";
        return kNumerical;
    }
}

}  // namespace perifix::cli
