// ladderlab: command-line front end.
//
// Exit codes: 0 success, 1 usage or runtime error, 2 hard invariant failed,
// 3 regime error (coupled xi < 2 without an explicit xi).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ladderlab/ladderlab.hpp"

namespace ll = ladderlab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitRegime = 3;

struct Options {
  std::string format = "json";
  std::string cache;
  std::string plot_data;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double tol = 1e-8;
  int rs_terms = 3;

  // experiment parameters
  double T = 1e5;
  double u_exponent = 0.6;
  double epsilon = 0.1;
  std::string xi = "50";
  double x = ll::kPi / 4.0;
  double y = ll::kPi / 4.0;
  int n1 = 1;
  int n2 = 1;
  std::string formula = "2.5";
  std::string kind = "G3";
  std::string f = "const";
  std::string corollary = "3.4";
  std::string which = "6.4p";

  // evaluation and ladder commands
  double t = 1000.0;
  double t_max = 1.05e6;
  double ly = 0.0;
  double angle = ll::kPi / 4.0;
};

std::string default_cache() {
  if (const char* env = std::getenv("LADDER_LAB_CACHE"); env && *env) return env;
  return "ladderlab_z2.cache";
}

ll::TableSettings table_settings(const Options& o) {
  ll::TableSettings s;
  s.tol = o.tol;
  s.threads = o.threads;
  s.z.rs_correction_terms = o.rs_terms;
  return s;
}

/// Loads the cache, extending it (and saving) when it does not reach t_needed.
std::shared_ptr<const ll::CumulativeZ2Table> load_table(const Options& o, double t_needed) {
  const auto settings = table_settings(o);
  const std::filesystem::path path = o.cache;
  std::optional<ll::CumulativeZ2Table> table;
  if (std::filesystem::exists(path)) table.emplace(ll::cache_load(path, settings));
  if (!table) {
    std::cerr << "building Z^2 table to t = " << t_needed << " (" << path.string() << ")\n";
    table.emplace(ll::CumulativeZ2Table::build(t_needed, settings));
    ll::cache_save(*table, path);
  } else if (table->t_max() < t_needed) {
    std::cerr << "extending Z^2 table from t = " << table->t_max() << " to " << t_needed << "\n";
    table->extend_to(t_needed);
    ll::cache_save(*table, path);
  }
  return std::make_shared<const ll::CumulativeZ2Table>(std::move(*table));
}

/// Table coverage needed for preimages of [T, T + U].
double coverage_for(double T, double U) {
  const double top = T + U;
  return top + 1.2 * (1.0 - ll::kEulerGamma) * top / std::log(top / ll::kTwoPi) + 64.0;
}

ll::ExperimentParams params_from(const Options& o) {
  ll::ExperimentParams p;
  p.T = o.T;
  p.u_exponent = o.u_exponent;
  p.epsilon = o.epsilon;
  if (o.xi == "coupled") {
    p.xi_override.reset();
  } else {
    std::size_t used = 0;
    p.xi_override = std::stod(o.xi, &used);
    if (used != o.xi.size()) throw ll::DomainError("--xi takes a number or 'coupled'");
  }
  p.x = o.x;
  p.y = o.y;
  p.n1 = o.n1;
  p.n2 = o.n2;
  p.tol = o.tol;
  p.threads = o.threads;
  p.validate();
  return p;
}

ll::GKind parse_kind(const std::string& s) {
  if (s == "G3" || s == "g3") return ll::GKind::G3;
  if (s == "G4" || s == "g4") return ll::GKind::G4;
  throw ll::DomainError("--kind must be G3 or G4");
}

void emit_json_or_csv(const Options& o, const json& j) {
  if (o.format == "csv") {
    std::string head;
    std::string row;
    for (const auto& [k, v] : j.items()) {
      head += (head.empty() ? "" : ",") + k;
      row += (row.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
    }
    std::cout << head << '\n' << row << '\n';
  } else {
    std::cout << j.dump(2) << '\n';
  }
}

void emit_union(const Options& o, const ll::IntervalUnion& u) {
  if (o.format == "csv") {
    std::cout << u.to_csv();
  } else {
    std::cout << u.to_json().dump() << '\n';
  }
}

int emit_report(const Options& o, const ll::ExperimentReport& r) {
  if (o.format == "csv") {
    std::cout << ll::to_csv(r);
  } else {
    std::cout << ll::to_json(r).dump(2) << '\n';
  }
  if (!o.plot_data.empty()) {
    std::ofstream out(o.plot_data);
    if (!out) throw ll::CacheError("cannot write plot data to " + o.plot_data);
    out << ll::plot_csv(r);
  }
  for (const auto& c : r.checks)
    if (c.hard && !c.passed) std::cerr << "hard check failed: " << c.name << " (" << c.value << " > " << c.bound << ")\n";
  return r.hard_ok() ? kExitOk : kExitInvariant;
}

void add_experiment_flags(CLI::App* app, Options& o) {
  app->add_option("--T", o.T, "Base height T (scientific notation welcome)");
  app->add_option("--u-exponent", o.u_exponent, "U = T^u");
  app->add_option("--epsilon", o.epsilon, "Selberg epsilon");
  app->add_option("--xi", o.xi, "Short-sum cutoff, or 'coupled' for (T/2pi)^{eps/10}");
  app->add_option("--x", o.x, "G3 angle x in (0, pi/2]");
  app->add_option("--y", o.y, "G4 angle y in (0, pi/2]");
  app->add_option("--tol", o.tol, "Relative quadrature tolerance");
  app->add_option("--plot-data", o.plot_data, "Write (t, integrand) CSV to this file");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.cache = default_cache();
  CLI::App app{"Numerical laboratory for Jacob's ladder, G-sets and short trigonometric sums"};
  app.require_subcommand(1);
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--cache", o.cache, "Z^2 table cache file (default $LADDER_LAB_CACHE)");
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--rs-terms", o.rs_terms, "Riemann-Siegel correction terms (0..4)")->check(CLI::Range(0, 4));

  auto* eval_z = app.add_subcommand("eval-z", "Z(t) and theta_1(t)");
  eval_z->add_option("--t", o.t)->required();
  auto* eval_theta = app.add_subcommand("eval-theta", "theta(t) and theta_1(t)");
  eval_theta->add_option("--t", o.t)->required();

  auto* ladder = app.add_subcommand("ladder", "Cumulative table and ladder queries");
  ladder->require_subcommand(1);
  auto* l_build = ladder->add_subcommand("build", "Build or extend the cache");
  l_build->add_option("--t-max", o.t_max);
  l_build->add_option("--tol", o.tol);
  auto* l_query = ladder->add_subcommand("query", "F(T), phi_1(T), Z~^2(T)");
  l_query->add_option("--T", o.T)->required();
  auto* l_invert = ladder->add_subcommand("invert", "phi_1^{-1}(y)");
  l_invert->add_option("--y", o.ly)->required();

  auto* gset = app.add_subcommand("gset", "G3 / G4 sets");
  gset->require_subcommand(1);
  std::vector<CLI::App*> gset_cmds;
  for (const char* name : {"build", "measure", "pullback"}) {
    auto* c = gset->add_subcommand(name);
    c->add_option("--kind", o.kind)->check(CLI::IsMember({"G3", "G4", "g3", "g4"}));
    c->add_option("--angle", o.angle, "x or y in (0, pi/2]");
    c->add_option("--T", o.T);
    c->add_option("--u-exponent", o.u_exponent);
    gset_cmds.push_back(c);
  }

  auto* exp = app.add_subcommand("experiment", "Run one formula check");
  exp->require_subcommand(1);
  auto* e_hl = exp->add_subcommand("hardy-littlewood");
  auto* e_sel = exp->add_subcommand("selberg");
  e_sel->add_option("--n1", o.n1);
  e_sel->add_option("--n2", o.n2);
  auto* e_thm = exp->add_subcommand("theorem");
  e_thm->add_option("--formula", o.formula)->check(CLI::IsMember({"2.5", "2.6", "2.7"}));
  e_thm->add_option("--kind", o.kind)->check(CLI::IsMember({"G3", "G4", "g3", "g4"}));
  auto* e_dir = exp->add_subcommand("direct", "Un-laddered G-set integrals");
  e_dir->add_option("--formula", o.which)->check(CLI::IsMember({"6.4p", "6.4n", "6.5d"}));
  e_dir->add_option("--kind", o.kind)->check(CLI::IsMember({"G3", "G4", "g3", "g4"}));
  auto* e_meas = exp->add_subcommand("measure");
  e_meas->add_option("--kind", o.kind)->check(CLI::IsMember({"G3", "G4", "g3", "g4"}));
  auto* e_mv = exp->add_subcommand("mean-value");
  e_mv->add_option("--corollary", o.corollary)->check(CLI::IsMember({"3.4", "3.5"}));
  auto* e_div = exp->add_subcommand("divisor-means");
  auto* e_area = exp->add_subcommand("area-law");
  auto* e_sign = exp->add_subcommand("sign-scan");
  auto* e_sub = exp->add_subcommand("substitution");
  e_sub->add_option("--f", o.f)->check(CLI::IsMember({"const", "linear", "coslog"}));
  auto* e_dist = exp->add_subcommand("distance");
  for (auto* c : {e_hl, e_sel, e_thm, e_dir, e_meas, e_mv, e_div, e_area, e_sign, e_sub, e_dist})
    add_experiment_flags(c, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (eval_z->parsed()) {
      ll::ZEvaluatorConfig cfg;
      cfg.rs_correction_terms = o.rs_terms;
      const ll::ZEvaluator z(cfg);
      emit_json_or_csv(o, {{"t", o.t}, {"z", z(o.t)}, {"theta1", ll::theta1(o.t)}});
      return kExitOk;
    }
    if (eval_theta->parsed()) {
      emit_json_or_csv(o, {{"t", o.t}, {"theta", ll::theta(o.t)}, {"theta1", ll::theta1(o.t)}});
      return kExitOk;
    }
    if (l_build->parsed()) {
      const auto table = load_table(o, o.t_max);
      emit_json_or_csv(o, {{"cache", o.cache},
                           {"t_max", table->t_max()},
                           {"rows", table->values().size()},
                           {"F_t_max", table->values().back()}});
      return kExitOk;
    }
    if (l_query->parsed()) {
      const ll::LadderModel L(load_table(o, o.T));
      json j = {{"T", o.T}, {"F", L.cumulative_z2(o.T)}, {"phi1", L.phi1(o.T)}, {"z2_tilde", L.z2_tilde(o.T)}};
      if (o.T >= 1e4) j["ladder_gap_ratio"] = L.ladder_gap_ratio(o.T);
      emit_json_or_csv(o, j);
      return kExitOk;
    }
    if (l_invert->parsed()) {
      const ll::LadderModel L(load_table(o, coverage_for(o.ly, 0.0)));
      emit_json_or_csv(o, {{"y", o.ly}, {"T_hat", L.phi1_invert(o.ly)}});
      return kExitOk;
    }
    for (auto* c : gset_cmds) {
      if (!c->parsed()) continue;
      const double U = std::pow(o.T, o.u_exponent);
      const auto G = ll::build_gset({parse_kind(o.kind), o.angle, o.T, U});
      if (c->get_name() == "build") {
        emit_union(o, G);
      } else if (c->get_name() == "measure") {
        emit_json_or_csv(o, {{"kind", o.kind},
                             {"angle", o.angle},
                             {"T", o.T},
                             {"U", U},
                             {"intervals", G.size()},
                             {"measure", G.measure()},
                             {"ratio", G.measure() / (o.angle / ll::kPi * U)}});
      } else {
        const ll::LadderModel L(load_table(o, coverage_for(o.T, U)));
        emit_union(o, ll::pullback(G, L));
      }
      return kExitOk;
    }

    const auto p = params_from(o);
    ll::ExperimentContext ctx;
    ctx.plot_data = !o.plot_data.empty();
    ctx.z = ll::ZEvaluator([&] {
      ll::ZEvaluatorConfig cfg;
      cfg.rs_correction_terms = o.rs_terms;
      return cfg;
    }());
    const bool needs_ladder = e_thm->parsed() || e_mv->parsed() || e_div->parsed() || e_area->parsed() ||
                              e_sub->parsed() || e_dist->parsed() || e_meas->parsed();
    if (needs_ladder) {
      ctx.ladder = std::make_shared<const ll::LadderModel>(load_table(o, coverage_for(p.T, p.U())));
      ctx.cache_file = o.cache;
    }
    if (e_hl->parsed()) return emit_report(o, ll::run_hardy_littlewood(ctx, p));
    if (e_sel->parsed()) return emit_report(o, ll::run_selberg(ctx, p));
    if (e_thm->parsed()) {
      const auto f = o.formula == "2.5"   ? ll::TheoremFormula::T2_5
                     : o.formula == "2.6" ? ll::TheoremFormula::T2_6
                                          : ll::TheoremFormula::T2_7;
      return emit_report(o, ll::run_theorem(ctx, f, parse_kind(o.kind), p));
    }
    if (e_dir->parsed()) {
      const auto f = o.which == "6.4p"   ? ll::DirectFormula::E6_4p
                     : o.which == "6.4n" ? ll::DirectFormula::E6_4n
                                         : ll::DirectFormula::E6_5d;
      return emit_report(o, ll::run_G_formulas_direct(ctx, f, parse_kind(o.kind), p));
    }
    if (e_meas->parsed()) return emit_report(o, ll::run_measure_check(ctx, parse_kind(o.kind), p));
    if (e_mv->parsed())
      return emit_report(
          o, ll::run_mean_value(ctx, o.corollary == "3.4" ? ll::Corollary::C3_4 : ll::Corollary::C3_5, p));
    if (e_div->parsed()) return emit_report(o, ll::run_divisor_means(ctx, p));
    if (e_area->parsed()) return emit_report(o, ll::run_area_law(ctx, p));
    if (e_sign->parsed()) return emit_report(o, ll::run_sign_scan(ctx, p));
    if (e_sub->parsed()) {
      const auto f = o.f == "const"    ? ll::SubstitutionF::constant
                     : o.f == "linear" ? ll::SubstitutionF::linear
                                       : ll::SubstitutionF::coslog;
      return emit_report(o, ll::run_substitution_check(ctx, f, p));
    }
    if (e_dist->parsed()) return emit_report(o, ll::run_distance_check(ctx, p));
  } catch (const ll::RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return kExitRegime;
  } catch (const ll::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
