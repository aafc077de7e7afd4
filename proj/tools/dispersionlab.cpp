// Command-line front end: numerical lab for odd-order dispersion kernels,
// their spectral pairs, and very singular similarity solutions.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "dispersionlab/asymptotics.hpp"
#include "dispersionlab/evolution.hpp"
#include "dispersionlab/io.hpp"
#include "dispersionlab/kernel.hpp"
#include "dispersionlab/majorant.hpp"
#include "dispersionlab/spectral.hpp"
#include "dispersionlab/version.hpp"
#include "dispersionlab/vss.hpp"

namespace dl = dispersionlab;
using json = nlohmann::ordered_json;

namespace {

json meta(int k) {
    return {{"tool", "dispersionlab"},
            {"version", DISPERSIONLAB_VERSION},
            {"k", k}};
}

std::string meta_line(int k, const dl::kernel::ShootingConfig& cfg) {
    std::ostringstream os;
    os << "k=" << k << " match_tol=" << cfg.match_tolerance
       << " integ_tol=" << cfg.integrator_tolerance;
    return os.str();
}

// Exact rational from a decimal or fractional literal ("3.99", "5/2").
dl::rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return dl::rational(boost::multiprecision::cpp_int(s.substr(0, slash)),
                            boost::multiprecision::cpp_int(s.substr(slash + 1)));
    auto dot = s.find('.');
    if (dot == std::string::npos) return dl::rational(boost::multiprecision::cpp_int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    dl::rational den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return dl::rational(boost::multiprecision::cpp_int(digits)) / den;
}

dl::spectral::DataFunction load_data(const std::string& path) {
    auto s = dl::io::read_samples(path);
    auto xs = std::make_shared<std::vector<double>>(std::move(s.x));
    auto us = std::make_shared<std::vector<double>>(std::move(s.u));
    dl::spectral::DataFunction d;
    d.support_left = xs->front();
    d.support_right = xs->back();
    d.decay = dl::spectral::decay_class::compact_support;
    d.f = [xs, us](double z) {
        if (z <= xs->front() || z >= xs->back()) return 0.0;
        auto it = std::upper_bound(xs->begin(), xs->end(), z);
        auto i = std::size_t(it - xs->begin()) - 1;
        double t = (z - (*xs)[i]) / ((*xs)[i + 1] - (*xs)[i]);
        return (1.0 - t) * (*us)[i] + t * (*us)[i + 1];
    };
    return d;
}

void write_plot_script(const std::string& path, const std::string& csv,
                       const std::string& xlabel, const std::string& ylabel) {
    std::ofstream out(path);
    out << "#!/usr/bin/env python3\n"
        << "import csv\n"
        << "import matplotlib.pyplot as plt\n"
        << "xs, ys = [], []\n"
        << "with open(" << std::quoted(csv) << ") as fh:\n"
        << "    for row in csv.reader(fh):\n"
        << "        if not row or row[0].startswith('#'):\n"
        << "            continue\n"
        << "        xs.append(float(row[0])); ys.append(float(row[1]))\n"
        << "plt.plot(xs, ys, lw=0.8)\n"
        << "plt.xlabel(" << std::quoted(xlabel) << ")\n"
        << "plt.ylabel(" << std::quoted(ylabel) << ")\n"
        << "plt.grid(alpha=0.3)\n"
        << "plt.savefig(" << std::quoted(csv + ".png") << ", dpi=150)\n";
}

const char* side_name(dl::asymptotics::side s) {
    return s == dl::asymptotics::side::plus_infinity ? "+inf" : "-inf";
}
const char* class_name(dl::asymptotics::root_class c) {
    switch (c) {
        case dl::asymptotics::root_class::growing: return "growing";
        case dl::asymptotics::root_class::neutral: return "neutral";
        default: return "decaying";
    }
}

json weight_json(const dl::asymptotics::WeightSpec& w) {
    json j;
    j["side"] = side_name(w.tail);
    j["exponent"] = w.exponent;
    j["d_gap"] = std::isinf(w.d_gap) ? json("inf") : json(w.d_gap);
    j["a_max"] = std::isinf(w.a_max) ? json("inf") : json(w.a_max);
    return j;
}

int cmd_radiation(int k) {
    json out;
    out["meta"] = meta(k);
    auto p = dl::asymptotics::dispersion_constants(k);
    out["constants"] = {{"alpha", p.alpha},
                        {"d_k", p.d_k},
                        {"b_k", p.b_k},
                        {"d_hat_k", p.d_hat_k},
                        {"envelope_exp", p.envelope_exp},
                        {"pure_exponential_left_tail", p.pure_exponential_left_tail}};
    for (auto s : {dl::asymptotics::side::plus_infinity,
                   dl::asymptotics::side::minus_infinity}) {
        json roots = json::array();
        int grow = 0, neut = 0, decay = 0;
        for (const auto& r : dl::asymptotics::bundle_roots(k, s)) {
            roots.push_back({{"m", r.m},
                             {"re", r.value.real()},
                             {"im", r.value.imag()},
                             {"class", class_name(r.classification)}});
            if (r.classification == dl::asymptotics::root_class::growing) ++grow;
            else if (r.classification == dl::asymptotics::root_class::neutral) ++neut;
            else ++decay;
        }
        json census = {{"growing", grow}, {"neutral", neut}, {"decaying", decay}};
        out[s == dl::asymptotics::side::plus_infinity ? "roots_plus" : "roots_minus"] =
            {{"census", census}, {"roots", roots}};
    }
    auto wb = dl::asymptotics::weight_bounds(k);
    out["weights"] = {{"rho_plus", weight_json(wb.rho_plus)},
                      {"rho_minus", weight_json(wb.rho_minus)},
                      {"rho_star_plus", weight_json(wb.rho_star_plus)},
                      {"rho_star_minus", weight_json(wb.rho_star_minus)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_kernel(int k, const std::string& mode, const std::string& out_path,
               const std::string& oracle, double grid_step, int table_order,
               const std::string& plot) {
    auto cfg = dl::kernel::ShootingConfig::defaults(k);
    if (grid_step > 0) cfg.grid_spacing = grid_step;
    auto norm = (mode == "max") ? dl::kernel::normalization::unit_max
                                : dl::kernel::normalization::unit_integral;
    auto prof = dl::kernel::solve_kernel(k, cfg, norm);
    int orders = std::max(table_order, 2 * k - 1);
    prof = dl::kernel::derivative_table(prof, orders);

    if (!out_path.empty()) {
        std::vector<std::string> cols{"y"};
        for (int m = 0; m <= orders; ++m) cols.push_back("F" + std::string(m, '\''));
        dl::io::CsvWriter csv(out_path, meta_line(k, cfg) + " mode=" + mode, cols);
        for (std::size_t i = 0; i < prof.grid.size(); ++i) {
            std::vector<double> row{prof.grid[i]};
            for (int m = 0; m <= orders; ++m)
                row.push_back(prof.deriv_table[std::size_t(m)][i]);
            csv.row(row);
        }
        if (!plot.empty()) write_plot_script(plot, out_path, "y", "F");
    }
    json rep;
    rep["meta"] = meta(k);
    rep["mode"] = mode;
    rep["match_point"] = prof.match_point;
    rep["regularized_mass"] = prof.regularized_mass;
    if (oracle == "fourier") {
        // the fourier evaluator is unit-integral; rescale it into the
        // profile's normalization before comparing
        const double scale = (norm == dl::kernel::normalization::unit_max)
                                 ? prof.regularized_mass
                                 : 1.0;
        double worst = 0.0, where = 0.0;
        for (double y = std::max(-8.0, prof.grid.front());
             y <= std::min(15.0, prof.grid.back()); y += 0.25) {
            double a = prof.values()[prof.index_of(y)];
            double b = scale * dl::kernel::fourier_point(k, y);
            if (std::abs(a - b) > worst) { worst = std::abs(a - b); where = y; }
        }
        rep["fourier_max_deviation"] = worst;
        rep["fourier_worst_abscissa"] = where;
    }
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_spectrum(int k, int L, const std::string& mode) {
    auto prof = dl::kernel::derivative_table(
        dl::kernel::solve_kernel(k, dl::kernel::ShootingConfig::defaults(k)),
        L + 2 * k + 1);
    auto policy = dl::spectral::TruncationPolicy::defaults(
        k, mode == "filtered" ? dl::spectral::pairing_mode::filtered_quadrature
                              : dl::spectral::pairing_mode::analytic_case_split);
    auto M = dl::spectral::biorthonormality_matrix(L, k, prof, policy);
    json rep;
    rep["meta"] = meta(k);
    rep["mode"] = mode;
    rep["L"] = L;
    rep["nu"] = policy.nu;
    rep["matrix"] = M;
    json residuals = json::array();
    for (int l = 0; l <= L; ++l) {
        auto pair = dl::spectral::eigenfunction(l, prof);
        residuals.push_back({{"l", l},
                             {"lambda", dl::spectral::eigenvalue(l, k).convert_to<double>()},
                             {"residual", dl::spectral::residual_B(pair, prof)}});
    }
    rep["eigen_residuals"] = residuals;
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_adjoint_poly(int k, int l, const std::string& convention) {
    auto conv = (convention == "metric") ? dl::spectral::sign_convention::metric_adjusted
                                         : dl::spectral::sign_convention::plain;
    auto a = dl::spectral::adjoint_polynomial(l, k, conv);
    json rep;
    rep["meta"] = meta(k);
    rep["l"] = l;
    rep["lambda"] = a.lambda.convert_to<double>();
    rep["convention"] = convention;
    rep["common_factor"] = "1/sqrt(" + std::to_string(l) + "!)";
    json coeffs = json::array();
    for (const auto& [d, c] : a.poly.coeffs) {
        std::ostringstream os;
        os << c;
        coeffs.push_back({{"degree", d}, {"coefficient", os.str()}});
    }
    rep["coefficients"] = coeffs;
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_evolve(int k, const std::string& data, double t, const std::string& method,
               int L, double xmin, double xmax, double dx, const std::string& out_path,
               const std::string& plot) {
    auto u0 = load_data(data);
    auto cfg = dl::kernel::ShootingConfig::defaults(k);
    auto prof = dl::kernel::solve_kernel(k, cfg);
    std::vector<double> x;
    for (double v = xmin; v <= xmax + 1e-12; v += dx) x.push_back(v);
    std::vector<double> u;
    long extrapolated = 0;
    if (method == "series") {
        if (t < 1.0)
            throw dl::invalid_argument_error("series method needs t >= 1 (tau >= 0)");
        prof = dl::kernel::derivative_table(prof, L + 1);
        const double s = std::pow(t, -1.0 / double(2 * k + 1));
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * s;
        auto st = dl::evolution::evolve_expansion(prof, u0, std::log(t), L, y);
        u = st.w;
        for (double& v : u) v *= s;
    } else {
        u = dl::evolution::evolve_convolution(prof, u0, t, x, &extrapolated);
    }
    if (!out_path.empty()) {
        dl::io::CsvWriter csv(out_path, meta_line(k, cfg) + " t=" + std::to_string(t),
                              {"x", "u"});
        for (std::size_t i = 0; i < x.size(); ++i) csv.row({x[i], u[i]});
        if (!plot.empty()) write_plot_script(plot, out_path, "x", "u");
    }
    json rep;
    rep["meta"] = meta(k);
    rep["t"] = t;
    rep["method"] = method;
    if (extrapolated > 0) rep["warning"] = "kernel window exceeded; envelope extrapolation used";
    rep["extrapolated_evaluations"] = extrapolated;
    double sup = 0.0;
    for (double v : u) sup = std::max(sup, std::abs(v));
    rep["sup_norm"] = sup;
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_classify(int k, const std::string& data, int L) {
    auto u0 = load_data(data);
    auto c = dl::evolution::classify_decay(u0, L, k);
    json rep;
    rep["meta"] = meta(k);
    rep["l_star"] = c.leading_index;
    rep["coefficient"] = c.coefficient;
    std::ostringstream os;
    os << c.rate;
    rep["rate"] = os.str();
    rep["rate_value"] = c.rate.convert_to<double>();
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_vss(int k, double p, double left, double right, const std::string& out_path,
            const std::string& plot) {
    auto cfg = dl::kernel::ShootingConfig::defaults(k);
    cfg.left_endpoint = left;
    cfg.right_endpoint = right;
    auto kern = dl::kernel::derivative_table(
        dl::kernel::solve_kernel(k, dl::kernel::ShootingConfig::defaults(k)), 2 * k);
    auto prof = dl::vss::solve_vss(k, p, cfg, kern);
    if (!out_path.empty()) {
        std::ostringstream m;
        m << meta_line(k, cfg) << " p=" << p << " tail_metric=" << prof.tail_metric;
        dl::io::CsvWriter csv(out_path, m.str(), {"y", "f", "f'", "f''"});
        for (std::size_t i = 0; i < prof.grid.size(); ++i)
            csv.row({prof.grid[i], prof.f()[i], prof.states[1][i], prof.states[2][i]});
        if (!plot.empty()) write_plot_script(plot, out_path, "y", "f");
    }
    json rep;
    rep["meta"] = meta(k);
    rep["p"] = p;
    rep["sup_norm"] = prof.sup_norm;
    rep["tail_metric"] = prof.tail_metric;
    rep["tail_onset"] = prof.tail_onset;
    rep["right_endpoint"] = prof.right_endpoint;
    rep["spurious_oscillation"] = prof.spurious_oscillation;
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_branch(int k, int l, double from, double to, double step,
               const std::string& out_path, const std::string& plot) {
    auto cfg = dl::kernel::ShootingConfig::defaults(k);
    cfg.left_endpoint = -6.0;
    cfg.right_endpoint = 10.0;
    auto kern = dl::kernel::derivative_table(
        dl::kernel::solve_kernel(k, dl::kernel::ShootingConfig::defaults(k)), 2 * k);
    auto br = dl::vss::trace_branch(l, k, from, to, step, cfg, kern);
    if (!out_path.empty()) {
        std::ostringstream m;
        m << meta_line(k, cfg) << " l=" << l << " step=" << step;
        dl::io::CsvWriter csv(out_path, m.str(), {"p", "sup_norm"});
        for (const auto& [p, s] : br.points) csv.row({p, s});
        if (!plot.empty()) write_plot_script(plot, out_path, "p", "sup|f|");
    }
    json rep;
    rep["meta"] = meta(k);
    rep["l"] = l;
    rep["points"] = br.points.size();
    rep["complete"] = br.complete;
    if (!br.points.empty()) {
        rep["first"] = {{"p", br.points.front().first}, {"sup", br.points.front().second}};
        rep["last"] = {{"p", br.points.back().first}, {"sup", br.points.back().second}};
    }
    std::cout << rep.dump(2) << "\n";
    return br.complete ? 0 : 1;
}

int cmd_stability(int k, const std::string& p_str, int L) {
    auto p = parse_rational(p_str);
    auto rep = dl::vss::linearized_spectrum(p, k, L);
    json out;
    out["meta"] = meta(k);
    out["p"] = rep.p;
    out["d1"] = rep.d1;
    out["verdict"] = rep.verdict == dl::vss::stability_verdict::stable     ? "stable"
                     : rep.verdict == dl::vss::stability_verdict::unstable ? "unstable"
                                                                           : "critical";
    out["spectrum_head"] = rep.spectrum_head;
    if (rep.zero_index) out["zero_index"] = *rep.zero_index;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_gamma(int k, int l) {
    auto kern = dl::kernel::derivative_table(
        dl::kernel::solve_kernel(k, dl::kernel::ShootingConfig::defaults(k)),
        std::max(2 * k, l + 1));
    double g = dl::vss::gamma_l(l, k, kern, dl::spectral::TruncationPolicy::defaults(k));
    json rep;
    rep["meta"] = meta(k);
    rep["l"] = l;
    rep["gamma"] = g;
    rep["positive"] = g > 0.0;
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_majorant(int k, const std::string& check_data, double t,
                 const std::string& out_path, const std::string& plot) {
    auto kern = dl::kernel::derivative_table(
        dl::kernel::solve_kernel(k, dl::kernel::ShootingConfig::defaults(k)), 2 * k);
    auto m = dl::majorant::majorant_kernel(kern, kern.grid);
    double dbar = dl::majorant::majorant_constant(kern, m);
    if (!out_path.empty()) {
        std::ostringstream ml;
        ml << "k=" << k << " a=" << m.a << " Dbar=" << dbar;
        dl::io::CsvWriter csv(out_path, ml.str(), {"y", "Fbar", "absF", "Dbar"});
        for (std::size_t i = 0; i < m.grid.size(); ++i)
            csv.row({m.grid[i], m.values[i], std::abs(kern.values()[i]), dbar});
        if (!plot.empty()) write_plot_script(plot, out_path, "y", "Fbar");
    }
    json rep;
    rep["meta"] = meta(k);
    rep["omega1"] = m.omega1;
    rep["a"] = m.a;
    rep["Dbar"] = dbar;
    rep["Dbar_exceeds_one"] = dbar > 1.0;
    if (!check_data.empty()) {
        auto u0 = load_data(check_data);
        dl::spectral::DataFunction u0bar = u0;
        u0bar.f = [f = u0.f, dbar](double z) { return dbar * std::abs(f(z)); };
        dl::majorant::require_majorized_data(u0, u0bar, dbar);
        std::vector<double> x;
        for (double v = -10.0; v <= 10.0 + 1e-9; v += 0.1) x.push_back(v);
        auto u = dl::evolution::evolve_convolution(kern, u0, t, x);
        auto ub = dl::majorant::majorant_evolution(m, u0bar, t, x);
        rep["domination"] = dl::majorant::compare(u, ub) ? "pass" : "fail";
        rep["t"] = t;
    }
    std::cout << rep.dump(2) << "\n";
    return (!check_data.empty() && rep["domination"] == "fail") ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dispersionlab: odd-order dispersion kernels, spectral pairs, and "
                 "very singular similarity solutions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", DISPERSIONLAB_VERSION);

    int k = 1, L = 10, l = 0, table_order = 0;
    double t = 1.0, p = 2.5, from = 2.0, to = 3.3, step = 0.005;
    double xmin = -10.0, xmax = 20.0, dx = 0.05, grid_step = 0.0;
    double left = -6.0, right = 10.0;
    std::string out_path, mode = "integral", spec_mode = "analytic", oracle, data;
    std::string method = "conv", p_str = "2.5", convention = "plain", plot;

    auto* ck = app.add_subcommand("kernel", "solve the rescaled fundamental kernel");
    ck->add_option("--k", k, "operator order parameter")->required();
    ck->add_option("--mode", mode, "normalization: integral|max");
    ck->add_option("--out", out_path, "CSV output path");
    ck->add_option("--oracle", oracle, "cross-check: fourier");
    ck->add_option("--grid-step", grid_step, "grid spacing");
    ck->add_option("--table-order", table_order, "derivative table order");
    ck->add_option("--plot-script", plot, "write a plot script here");

    auto* cr = app.add_subcommand("radiation", "bundle-root census and weight bounds");
    cr->add_option("--k", k)->required();

    auto* cs = app.add_subcommand("spectrum", "bi-orthonormality and eigen residuals");
    cs->add_option("--k", k)->required();
    cs->add_option("--L", L, "highest index");
    cs->add_option("--mode", spec_mode, "analytic|filtered");

    auto* ca = app.add_subcommand("adjoint-poly", "exact adjoint polynomial");
    ca->add_option("--k", k)->required();
    ca->add_option("--l", l)->required();
    ca->add_option("--convention", convention, "plain|metric");

    auto* ce = app.add_subcommand("evolve", "linear evolution from data");
    ce->add_option("--k", k)->required();
    ce->add_option("--data", data, "two-column CSV data")->required();
    ce->add_option("--t", t, "time")->required();
    ce->add_option("--method", method, "conv|series");
    ce->add_option("--L", L, "series truncation");
    ce->add_option("--xmin", xmin);
    ce->add_option("--xmax", xmax);
    ce->add_option("--dx", dx);
    ce->add_option("--out", out_path, "CSV output path");
    ce->add_option("--plot-script", plot);

    auto* cc = app.add_subcommand("classify", "leading moment index and decay rate");
    cc->add_option("--data", data)->required();
    cc->add_option("--k", k);
    cc->add_option("--L", L);

    auto* cv = app.add_subcommand("vss", "very singular similarity profile");
    cv->add_option("--k", k)->required();
    cv->add_option("--p", p)->required();
    cv->add_option("--left", left);
    cv->add_option("--right", right);
    cv->add_option("--out", out_path, "CSV output path");
    cv->add_option("--plot-script", plot);

    auto* cb = app.add_subcommand("branch", "continuation of a VSS branch in p");
    cb->add_option("--k", k)->required();
    cb->add_option("--l", l)->required();
    cb->add_option("--from", from)->required();
    cb->add_option("--to", to)->required();
    cb->add_option("--step", step);
    cb->add_option("--out", out_path, "CSV output path");
    cb->add_option("--plot-script", plot);

    auto* cst = app.add_subcommand("stability", "linearized stability report");
    cst->add_option("--k", k)->required();
    cst->add_option("--p", p_str)->required();
    cst->add_option("--L", L);

    auto* cg = app.add_subcommand("gamma", "centre-subspace pairing coefficient");
    cg->add_option("--k", k)->required();
    cg->add_option("--l", l)->required();

    auto* cm = app.add_subcommand("majorant", "positive comparison kernel");
    cm->add_option("--k", k)->required();
    cm->add_option("--check-evolution", data, "data file for the domination check");
    cm->add_option("--t", t, "time for the domination check");
    cm->add_option("--out", out_path, "CSV output path");
    cm->add_option("--plot-script", plot);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        if (ck->parsed())
            return cmd_kernel(k, mode, out_path, oracle, grid_step, table_order, plot);
        if (cr->parsed()) return cmd_radiation(k);
        if (cs->parsed()) return cmd_spectrum(k, L, spec_mode);
        if (ca->parsed()) return cmd_adjoint_poly(k, l, convention);
        if (ce->parsed())
            return cmd_evolve(k, data, t, method, L, xmin, xmax, dx, out_path, plot);
        if (cc->parsed()) return cmd_classify(k, data, L);
        if (cv->parsed()) return cmd_vss(k, p, left, right, out_path, plot);
        if (cb->parsed()) return cmd_branch(k, l, from, to, step, out_path, plot);
        if (cst->parsed()) return cmd_stability(k, p_str, L);
        if (cg->parsed()) return cmd_gamma(k, l);
        if (cm->parsed()) return cmd_majorant(k, data, t, out_path, plot);
    } catch (const dl::error& e) {
        json err{{"error", e.code()}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json err{{"error", "Internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 2;
}
