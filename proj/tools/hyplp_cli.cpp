// hyplp: command-line surface over the library.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hyplp/verify.hpp"

namespace {

using namespace hyplp;

struct Overrides {
  std::string config_path;
  std::optional<std::string> group;
  std::optional<int> radius;
  std::optional<int> delta;
  std::optional<std::string> p;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<std::size_t> memory_budget_mb;
  std::optional<std::string> out;
  std::vector<std::string> gen_order;

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (group) c.group = *group;
    if (radius) c.radius = *radius;
    if (delta) c.delta = *delta;
    if (p) c.p = RunConfig::parse_p(*p);
    if (seed) c.seed = *seed;
    if (samples) c.samples = *samples;
    if (memory_budget_mb) c.memory_budget_mb = *memory_budget_mb;
    if (out) c.output = *out;
    if (!gen_order.empty()) c.gen_order = gen_order;
    c.validate();
    return c;
  }
};

void emit(const RunConfig& config, const std::string& text) {
  if (config.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(config.output);
  if (!out) throw ConfigError("cannot write " + config.output);
  out << text;
}

void emit_json(const RunConfig& config, const nlohmann::json& j) { emit(config, j.dump(2) + "\n"); }

/// The configured p, or the selected one when p is "auto".
double resolve_p(const RunConfig& config, const Mineyev& m, const CayleyBall& ball, std::optional<DecayStudy>& study) {
  if (config.p) return *config.p;
  if (!study) study = study_decay(m, ball, config.samples, split_seed(config.seed, 5));
  return study->selection.p;
}

std::optional<TailModel> tail_model(const RunConfig& config, const Mineyev& m, const CayleyBall& ball,
                                    std::optional<DecayStudy>& study, double p) {
  if (m.group().has_unique_geodesics()) return std::nullopt;
  if (!study) study = study_decay(m, ball, config.samples, split_seed(config.seed, 5));
  const DecayFit fit = p == study->selection.p ? study->h_fit
                                               : fit_h_decay(draw_triples(m, ball, config.samples,
                                                                          split_seed(config.seed, 5)),
                                                             p);
  return TailModel{fit.constant, fit.base, study->upsilon};
}

int cmd_ball(const RunConfig& config, const std::string& export_path) {
  const Group group = make_group(config.group, config.delta);
  const CayleyBall ball = build_ball(group, config.radius, config.memory_budget_mb);
  nlohmann::json spheres = nlohmann::json::array();
  for (int r = 0; r <= ball.radius(); ++r) spheres.push_back(ball.layer(r).size());
  const CheckOutcome consistency = check_ball(ball);
  emit_json(config, {{"group", group.description()},
                     {"radius", ball.radius()},
                     {"size", ball.size()},
                     {"sphere_sizes", spheres},
                     {"upsilon", ball.radius() >= 1 ? nlohmann::json(estimate_upsilon(ball)) : nlohmann::json()},
                     {"bfs_consistency", consistency.to_json()}});
  if (!export_path.empty()) {
    std::ofstream out(export_path);
    if (!out) throw ConfigError("cannot write " + export_path);
    out << to_ball_json(ball).dump() << "\n";
  }
  return consistency.pass ? 0 : 1;
}

int cmd_certify_delta(const RunConfig& config) {
  const Context ctx(config);
  const CayleyBall ball = build_ball(ctx.group, config.radius, config.memory_budget_mb);
  const CertReport sampled = certify_delta(ball, *ctx.q, config.delta, config.samples, split_seed(config.seed, 2));
  const CertReport exhaustive = certify_delta_exhaustive(ball, *ctx.q, config.delta, std::min(4, config.radius));
  emit_json(config, {{"sampled", sampled.to_json()}, {"exhaustive", exhaustive.to_json()}});
  return sampled.pass && exhaustive.pass ? 0 : 1;
}

int cmd_chain(const RunConfig& config, const std::string& which, const std::string& a_text,
              const std::string& b_text) {
  const Context ctx(config);
  const Element a = ctx.group.parse(a_text);
  const Element b = ctx.group.parse(b_text);
  if (which == "f") {
    const Chain0 f = ctx.m->f_chain(a, b);
    emit_json(config, {{"kind", "f"}, {"a", ctx.group.format(a)}, {"b", ctx.group.format(b)},
                       {"chain", to_json(ctx.group, f)}, {"coefficient_sum", f.coefficient_sum().str()}});
    return 0;
  }
  const CayleyBall ball = build_ball(ctx.group, config.radius, config.memory_budget_mb);
  std::optional<DecayStudy> study;
  const double p = resolve_p(config, *ctx.m, ball, study);
  const HChain h = ctx.m->h_chain(a, b, p);
  emit_json(config, {{"kind", "h"},
                     {"b", ctx.group.format(a)},
                     {"a", ctx.group.format(b)},
                     {"p", p},
                     {"f", to_json(ctx.group, h.f)},
                     {"normalizer", h.normalizer},
                     {"chain", to_json(ctx.group, h.real())}});
  return 0;
}

int cmd_select_p(const RunConfig& config) {
  const Context ctx(config);
  const CayleyBall ball = build_ball(ctx.group, config.radius, config.memory_budget_mb);
  const DecayStudy study = study_decay(*ctx.m, ball, config.samples, split_seed(config.seed, 5));
  nlohmann::json j = study.selection.to_json();
  j["f_fit"] = study.f_fit.to_json();
  j["h_fit"] = study.h_fit.to_json();
  emit_json(config, j);
  return 0;
}

int cmd_cocycle(const RunConfig& config, const std::string& g_text, std::optional<int> window_radius) {
  const Context ctx(config);
  const Element g = ctx.group.parse(g_text);
  const CayleyBall ball = build_ball(ctx.group, config.radius, config.memory_budget_mb);
  std::optional<DecayStudy> study;
  const double p = resolve_p(config, *ctx.m, ball, study);
  const Cocycle c(*ctx.m, p);
  const auto tail = tail_model(config, *ctx.m, ball, study, p);
  std::optional<CayleyBall> window;
  if (tail) window.emplace(build_ball(ctx.group, window_radius.value_or(config.radius), config.memory_budget_mb));
  const CocycleRow row = cocycle_row(c, g, window ? &*window : nullptr, tail);
  emit_json(config, row.to_json(ctx.group));
  return row.bound_100delta_ok ? 0 : 1;
}

int cmd_verify(const RunConfig& config) {
  const SuiteReport report = run_verify(config);
  emit_json(config, report.to_json());
  return report.pass() ? 0 : 1;
}

int cmd_report(const RunConfig& config, const std::vector<std::string>& words) {
  const Context ctx(config);
  const CayleyBall ball = build_ball(ctx.group, config.radius, config.memory_budget_mb);
  std::optional<DecayStudy> study;
  const double p = resolve_p(config, *ctx.m, ball, study);
  const Cocycle c(*ctx.m, p);
  const auto tail = tail_model(config, *ctx.m, ball, study, p);
  std::vector<Element> gs;
  if (words.empty())
    gs = generator_powers(ctx.group, 0, 1, 30);
  else
    for (const auto& w : words) gs.push_back(ctx.group.parse(w));
  std::ostringstream csv;
  csv << "g_word,d_g_e,p,lower,tail_bound,properness_count,bound_20delta_ok,bound_100delta_ok\n";
  csv.precision(17);
  bool ok = true;
  for (const Element& g : gs) {
    const CocycleRow row = cocycle_row(c, g, tail ? &ball : nullptr, tail);
    ok = ok && row.bound_20delta_ok && row.bound_100delta_ok;
    csv << ctx.group.format(g) << ',' << row.d << ',' << row.p << ',' << row.lower << ',' << row.tail_bound << ','
        << row.properness_count << ',' << (row.bound_20delta_ok ? "true" : "false") << ','
        << (row.bound_100delta_ok ? "true" : "false") << '\n';
  }
  emit(config, csv.str());
  return ok ? 0 : 1;
}

int cmd_path(const RunConfig& config, const std::string& a_text, const std::string& b_text) {
  const Context ctx(config);
  const GeodesicPath path = ctx.q->q_path(ctx.group.parse(a_text), ctx.group.parse(b_text));
  nlohmann::json words = nlohmann::json::array();
  for (const Element& v : path.vertices) words.push_back(ctx.group.format(v));
  emit_json(config, {{"origin", ctx.group.format(path.origin)},
                     {"terminus", ctx.group.format(path.terminus)},
                     {"length", path.length()},
                     {"vertices", words}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged chains and proper affine lp actions on Cayley graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--group", o.group, "free:N, free-product:m1,m2,... or ball:PATH");
  app.add_option("--radius", o.radius, "ball radius R");
  app.add_option("--delta", o.delta, "declared fineness constant");
  app.add_option("--p", o.p, "exponent p, or auto");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--samples", o.samples, "sample count");
  app.add_option("--memory-budget-mb", o.memory_budget_mb, "memory budget for balls");
  app.add_option("--out", o.out, "output path (default stdout)");
  app.add_option("--gen-order", o.gen_order, "generator labels in tie-breaking order")->delimiter(',');

  std::string export_path;
  auto* ball = app.add_subcommand("ball", "materialize B(e,R) and summarize it");
  ball->add_option("--export", export_path, "write the ball in Cayley-ball JSON format");

  auto* certify = app.add_subcommand("certify-delta", "sampled and exhaustive fineness check");

  std::string which, a_word, b_word;
  auto* chain = app.add_subcommand("chain", "dump f(a,b) or h(a,b)");
  chain->add_option("which", which, "f or h")->required()->check(CLI::IsMember({"f", "h"}));
  chain->add_option("a", a_word, "first vertex (word)")->required();
  chain->add_option("b", b_word, "second vertex (word)")->required();

  auto* select = app.add_subcommand("select-p", "fit decay constants and choose p");

  std::string g_word;
  std::optional<int> window_radius;
  auto* cocycle = app.add_subcommand("cocycle", "norm of b(g) with bounds");
  cocycle->add_option("g", g_word, "group element (word)")->required();
  cocycle->add_option("--window-radius", window_radius, "centered window radius for non-exact mode");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");

  std::vector<std::string> report_words;
  auto* report = app.add_subcommand("report", "CSV of cocycle growth rows");
  report->add_option("g", report_words, "elements (default a^k, k=1..30)");

  std::string path_a, path_b;
  auto* path = app.add_subcommand("path", "bicombing path q[a,b] as words");
  path->add_option("a", path_a, "origin (word)")->required();
  path->add_option("b", path_b, "terminus (word)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = o.resolve();
    if (*ball) return cmd_ball(config, export_path);
    if (*certify) return cmd_certify_delta(config);
    if (*chain) return cmd_chain(config, which, a_word, b_word);
    if (*select) return cmd_select_p(config);
    if (*cocycle) return cmd_cocycle(config, g_word, window_radius);
    if (*verify) return cmd_verify(config);
    if (*report) return cmd_report(config, report_words);
    if (*path) return cmd_path(config, path_a, path_b);
  } catch (const InvariantViolation& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"witness", e.witness()}}.dump() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }
  return 2;
}
