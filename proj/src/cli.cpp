#include "geoexp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "geoexp/distortion.hpp"
#include "geoexp/io.hpp"
#include "geoexp/parallel.hpp"
#include "geoexp/random.hpp"
#include "geoexp/scene.hpp"
#include "geoexp/surface_curves.hpp"
#include "geoexp/version.hpp"

namespace geoexp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string scene;
  std::string seed_point = "0,0,1";
  int m = 50;
  int n = 10;
  double h = 0.01;
  double s = 0.70710678118654752;
  double kappa = 1e3;
  bool substepping = true;
  bool smoothing = true;
  bool raw_gradient = false;
  double epsilon = 1e-4;
  int mc_samples = 10;
  double tolerance = 1e-10;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  std::string out = ".";
  int threads = -1;
  // Meshing and inverse queries.
  int interior = 10000;
  int boundary = 0;
  bool project = false;
  double max_radius = 1e-2;
  std::vector<std::string> points;
  bool multi = false;
  std::string rule = "shortest_radius";
  // error-sphere
  std::vector<int> sweep_m{5, 50, 500};
  std::vector<double> sweep_h{0.01};
  double radius = 1.0;
  int error_interior = 2000;
  int error_boundary = 500;
  // metrics
  std::string input;
  // curve
  std::vector<std::string> constraints;
  int segment_samples = 50;
  int sweeps = 10;
};

// Canonical argument list reproducing a configuration; stored in manifests.
std::vector<std::string> to_argv(const RunConfig& c) {
  std::vector<std::string> a{c.command};
  auto opt = [&](const char* name, const std::string& v) {
    a.emplace_back(name);
    a.push_back(v);
  };
  auto num = [](double v) { return format_double(v); };
  auto flag = [&](const char* name, bool on) {
    if (on) a.emplace_back(name);
  };
  if (!c.scene.empty()) opt("--scene", c.scene);
  opt("--seed-point", c.seed_point);
  opt("--m", std::to_string(c.m));
  opt("--n", std::to_string(c.n));
  opt("--h", num(c.h));
  opt("--s", num(c.s));
  opt("--kappa", num(c.kappa));
  flag("--no-substepping", !c.substepping);
  flag("--no-smoothing", !c.smoothing);
  flag("--raw-gradient", c.raw_gradient);
  opt("--epsilon", num(c.epsilon));
  opt("--mc-samples", std::to_string(c.mc_samples));
  opt("--tolerance", num(c.tolerance));
  opt("--max-iterations", std::to_string(c.max_iterations));
  opt("--seed", std::to_string(c.seed));
  opt("--interior", std::to_string(c.interior));
  opt("--boundary", std::to_string(c.boundary));
  flag("--project", c.project);
  opt("--max-radius", num(c.max_radius));
  for (const auto& p : c.points) opt("--point", p);
  flag("--multi", c.multi);
  opt("--rule", c.rule);
  for (int m : c.sweep_m) opt("--sweep-m", std::to_string(m));
  for (double h : c.sweep_h) opt("--sweep-h", num(h));
  opt("--radius", num(c.radius));
  opt("--error-interior", std::to_string(c.error_interior));
  opt("--error-boundary", std::to_string(c.error_boundary));
  if (!c.input.empty()) opt("--input", c.input);
  for (const auto& p : c.constraints) opt("--constraint", p);
  opt("--segment-samples", std::to_string(c.segment_samples));
  opt("--sweeps", std::to_string(c.sweeps));
  return a;
}

Vec3 parse_point(const std::string& text) {
  std::stringstream ss(text);
  Vec3 p;
  char c1 = 0, c2 = 0;
  if (!(ss >> p.x() >> c1 >> p.y() >> c2 >> p.z()) || c1 != ',' || c2 != ',')
    throw Error(ErrorCode::InvalidConfig, "expected a point as x,y,z but got '" + text + "'");
  return p;
}

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
  std::vector<std::string> outputs;
  std::uint64_t values = 0;
  std::uint64_t gradients = 0;
  std::size_t scene_input_size = 0;
};

TraceParams trace_params(const RunConfig& c) {
  TraceParams p;
  p.m = c.m;
  p.n = c.n;
  p.h = c.h;
  p.alignment_cosine = c.s;
  p.kappa = c.kappa;
  p.substepping = c.substepping;
  p.smoothing = c.smoothing;
  p.validate();
  return p;
}

SurfaceView surface_view(const RunConfig& c, const ImplicitSurface& s) {
  SmoothingConfig sm;
  sm.epsilon = c.epsilon;
  sm.sample_count = c.mc_samples;
  sm.seed = derive_seed(c.seed, "smoothing");
  sm.validate();
  ProjectionConfig pr;
  pr.tolerance = c.tolerance;
  pr.max_iterations = c.max_iterations;
  pr.validate();
  return SurfaceView(s, sm, pr, c.raw_gradient ? GradientMode::Raw : GradientMode::Smoothed);
}

LogQueryConfig query_config(const RunConfig& c) {
  LogQueryConfig q;
  q.interior_samples = c.interior;
  q.boundary_samples = c.boundary;
  q.project_to_surface = c.project;
  q.max_radius = c.max_radius;
  q.seed = c.seed;
  q.validate();
  return q;
}

Scene require_scene(Context& ctx) {
  if (ctx.cfg.scene.empty()) throw Error(ErrorCode::InvalidConfig, "--scene is required");
  Scene s = load_scene(ctx.cfg.scene);
  ctx.scene_input_size = s.input_size;
  return s;
}

void record_counters(Context& ctx, const ImplicitSurface& s) {
  const EvalCounters c = s.counters();
  ctx.values += c.values;
  ctx.gradients += c.gradients;
}

std::ofstream open_output(Context& ctx, const std::string& name) {
  const fs::path path = fs::path(ctx.cfg.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  ctx.outputs.push_back(name);
  return f;
}

void write_trace_csv(std::ostream& os, const TraceResult& t) {
  os << "i,j,x,y,z,tx,ty,tz,phi,theta,substeps\n";
  auto row = [&](int i, int j) {
    const Vec3& q = t.points[i][j];
    const Vec3& d = t.tangents[i][j];
    const bool angles = j < static_cast<int>(t.phi.size());
    const std::string phi = angles ? format_double(t.phi[j][i]) : "";
    const std::string theta = angles ? format_double(t.theta[j][i]) : "";
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", i, j, q.x(), q.y(), q.z(), d.x(), d.y(), d.z(), phi, theta,
                      t.substeps[i][j]);
  };
  row(0, 0);
  int longest = 0;
  for (const auto& p : t.points) longest = std::max(longest, static_cast<int>(p.size()));
  for (int j = 1; j < longest; ++j)
    for (int i = 0; i < t.m(); ++i)
      if (j < static_cast<int>(t.points[i].size())) row(i, j);
}

void cmd_param(Context& ctx) {
  Scene scene = require_scene(ctx);
  const SurfaceView view = surface_view(ctx.cfg, *scene.surface);
  const TraceResult trace = radial_trace(view, parse_point(ctx.cfg.seed_point), trace_params(ctx.cfg));
  const LocalMap map = LocalMap::fit(trace);
  const MapMesh mesh = build_map_mesh(map, query_config(ctx.cfg), &view);
  record_counters(ctx, *scene.surface);

  const fs::path obj = fs::path(ctx.cfg.out) / "map.obj";
  export_obj(mesh, obj, {fmt::format("geoexp {} local map", kVersion)});
  ctx.outputs.push_back("map.obj");
  {
    auto f = open_output(ctx, "trace.csv");
    write_trace_csv(f, trace);
  }
  const FoldReport folds = fold_report(mesh);
  fmt::print(ctx.out, "vertices {} triangles {} radius {} truncated_paths {} folds {}\n", mesh.uv().size(),
             mesh.triangles().size(), map.radius(), trace.aborted_paths, folds.intersecting_pairs);
  if (!folds.clean())
    fmt::print(ctx.out, "warning: map folds over itself ({} intersecting pairs, {} degenerate triangles)\n",
               folds.intersecting_pairs, folds.degenerate_triangles);
}

void cmd_trace_dump(Context& ctx) {
  Scene scene = require_scene(ctx);
  const SurfaceView view = surface_view(ctx.cfg, *scene.surface);
  const TraceResult trace = radial_trace(view, parse_point(ctx.cfg.seed_point), trace_params(ctx.cfg));
  record_counters(ctx, *scene.surface);
  auto f = open_output(ctx, "trace.csv");
  write_trace_csv(f, trace);
  fmt::print(ctx.out, "traced {} curves, {} complete steps\n", trace.m(), trace.complete_steps);
}

void cmd_logmap(Context& ctx) {
  if (ctx.cfg.points.empty()) throw Error(ErrorCode::InvalidConfig, "logmap needs at least one --point");
  const PreimageRule rule = ctx.cfg.rule == "smallest_phase" ? PreimageRule::SmallestPhase : PreimageRule::ShortestRadius;
  if (ctx.cfg.rule != "smallest_phase" && ctx.cfg.rule != "shortest_radius")
    throw Error(ErrorCode::InvalidConfig, "--rule must be shortest_radius or smallest_phase");
  Scene scene = require_scene(ctx);
  const SurfaceView view = surface_view(ctx.cfg, *scene.surface);
  const TraceResult trace = radial_trace(view, parse_point(ctx.cfg.seed_point), trace_params(ctx.cfg));
  const LocalMap map = LocalMap::fit(trace);
  const LogQueryConfig q = query_config(ctx.cfg);
  const MapMesh mesh = build_map_mesh(map, q, &view);
  record_counters(ctx, *scene.surface);

  auto f = open_output(ctx, "logmap.csv");
  f << "x,y,z,u,v,preimages\n";
  for (const auto& text : ctx.cfg.points) {
    const Vec3 x = parse_point(text);
    std::optional<Vec2> uv;
    std::size_t count = 0;
    if (ctx.cfg.multi) {
      const auto all = multivalued_log(mesh, x, q);
      count = all.size();
      if (!all.empty()) uv = select_preimage(all, rule);
    } else {
      uv = log_query(mesh, x, q);
      count = uv ? 1 : 0;
    }
    if (uv) {
      fmt::print(ctx.out, "{} {}\n", uv->x(), uv->y());
      f << fmt::format("{},{},{},{},{},{}\n", x.x(), x.y(), x.z(), uv->x(), uv->y(), count);
    } else {
      fmt::print(ctx.out, "none\n");
      f << fmt::format("{},{},{},,,0\n", x.x(), x.y(), x.z());
    }
  }
}

void cmd_error_sphere(Context& ctx) {
  auto f = open_output(ctx, "error_sphere.csv");
  f << "m,n,h,mean_error,traced_curve_error\n";
  ExpErrorSamples samples;
  samples.interior = ctx.cfg.error_interior;
  samples.boundary = ctx.cfg.error_boundary;
  samples.seed = ctx.cfg.seed;
  for (int m : ctx.cfg.sweep_m) {
    for (double h : ctx.cfg.sweep_h) {
      const int n = static_cast<int>(std::lround(ctx.cfg.radius / h));
      if (n < 1) throw Error(ErrorCode::InvalidConfig, "radius / h must be at least 1");
      const ExpErrorResult r = sphere_error_experiment(m, n, h, ctx.cfg.substepping, ctx.cfg.smoothing, samples);
      ctx.values += r.evaluations;
      const std::string line = fmt::format("{},{},{},{},{}\n", m, n, h, r.mean_error, r.traced_curve_error);
      f << line;
      ctx.out << line;
    }
  }
}

void cmd_metrics(Context& ctx) {
  if (ctx.cfg.input.empty()) throw Error(ErrorCode::InvalidConfig, "metrics needs --input");
  const TexturedMesh mesh = read_textured_obj(ctx.cfg.input);
  const EnergyReport sd = symmetric_dirichlet(mesh.uv, mesh.positions, mesh.triangles);
  const EnergyReport ls = lscm_energy(mesh.uv, mesh.positions, mesh.triangles);
  auto f = open_output(ctx, "metrics.csv");
  f << "triangle,area,symmetric_dirichlet,lscm\n";
  for (std::size_t k = 0; k < sd.energy.size(); ++k)
    f << fmt::format("{},{},{},{}\n", sd.triangle[k], sd.area[k], sd.energy[k], ls.energy[k]);
  fmt::print(ctx.out, "triangles {} symmetric_dirichlet_mean {} lscm_mean {} degenerate {} flipped {}\n",
             sd.energy.size(), sd.mean, ls.mean, sd.degenerate, sd.flipped);
}

void cmd_curve(Context& ctx) {
  if (ctx.cfg.constraints.size() < 3) throw Error(ErrorCode::InvalidConfig, "curve needs at least 3 --constraint points");
  Scene scene = require_scene(ctx);
  const SurfaceView view = surface_view(ctx.cfg, *scene.surface);
  const TraceParams params = trace_params(ctx.cfg);
  const LogQueryConfig q = query_config(ctx.cfg);
  std::vector<Chart> charts;
  for (const auto& c : ctx.cfg.constraints) charts.push_back(make_chart(view, parse_point(c), params, q));
  const SurfaceCurve curve = solve_closed_curve(charts, ctx.cfg.sweeps);

  double chart_deviation = 0.0;
  for (const auto& c : charts)
    for (const auto& p : c.mesh.positions()) chart_deviation = std::max(chart_deviation, std::abs(view.value(p)));
  double curve_deviation = 0.0;
  auto f = open_output(ctx, "curve.obj");
  f << fmt::format("# closed curve, {} segments, {} samples each\n", curve.segments.size(), ctx.cfg.segment_samples);
  int count = 0;
  for (int i = 0; i < static_cast<int>(curve.segments.size()); ++i)
    for (int k = 0; k < ctx.cfg.segment_samples; ++k) {
      const Vec3 x = eval_curve(charts, curve, i, static_cast<double>(k) / ctx.cfg.segment_samples);
      curve_deviation = std::max(curve_deviation, std::abs(view.value(x)));
      f << fmt::format("v {} {} {}\n", x.x(), x.y(), x.z());
      ++count;
    }
  f << "l";
  for (int k = 1; k <= count; ++k) f << ' ' << k;
  f << " 1\n";
  record_counters(ctx, *scene.surface);

  json report = {{"sweeps", curve.sweeps},
                 {"residual", curve.residual},
                 {"endpoint_mismatch", curve.endpoint_mismatch},
                 {"max_abs_f_curve", curve_deviation},
                 {"max_abs_f_charts", chart_deviation}};
  auto r = open_output(ctx, "curve_report.json");
  r << report.dump(2) << '\n';
  fmt::print(ctx.out, "residual {} endpoint_mismatch {} max_abs_f {} chart_deviation {}\n", curve.residual,
             curve.endpoint_mismatch, curve_deviation, chart_deviation);
}

void write_manifest(const Context& ctx) {
  json j;
  j["version"] = kVersion;
  j["command"] = ctx.cfg.command;
  j["argv"] = to_argv(ctx.cfg);
  j["seeds"] = {{"master", ctx.cfg.seed},
                {"smoothing", derive_seed(ctx.cfg.seed, "smoothing")},
                {"disc", derive_seed(ctx.cfg.seed, "disc")},
                {"error_samples", derive_seed(ctx.cfg.seed, "error-samples")}};
  j["counters"] = {{"values", ctx.values}, {"gradients", ctx.gradients}, {"total", ctx.values + ctx.gradients}};
  if (ctx.scene_input_size) j["scene_input_size"] = ctx.scene_input_size;
  j["outputs"] = ctx.outputs;
  const fs::path path = fs::path(ctx.cfg.out) / "manifest.json";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  f << j.dump(2) << '\n';
}

void add_common(CLI::App& app, RunConfig& c) {
  app.add_option("--scene", c.scene, "Scene description (JSON)");
  app.add_option("--seed-point", c.seed_point, "Seed point x,y,z (projected onto the surface)");
  app.add_option("--m", c.m, "Number of radial curves");
  app.add_option("--n", c.n, "Steps per radial curve");
  app.add_option("--h", c.h, "Step size");
  app.add_option("--s", c.s, "Alignment cosine for substepping");
  app.add_option("--kappa", c.kappa, "Holonomy regularization weight");
  app.add_flag("--no-substepping{false}", c.substepping, "Single projected step per outer step");
  app.add_flag("--no-smoothing{false}", c.smoothing, "Disable holonomy smoothing");
  app.add_flag("--raw-gradient", c.raw_gradient, "Use raw instead of smoothed gradients");
  app.add_option("--epsilon", c.epsilon, "Gradient smoothing radius");
  app.add_option("--mc-samples", c.mc_samples, "Gradient smoothing sample count");
  app.add_option("--tolerance", c.tolerance, "Projection tolerance on |f|");
  app.add_option("--max-iterations", c.max_iterations, "Projection iteration cap");
  app.add_option("--seed", c.seed, "Master random seed");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--interior", c.interior, "Interior samples of the map mesh");
  app.add_option("--boundary", c.boundary, "Boundary samples of the map mesh (0: 8m)");
  app.add_flag("--project", c.project, "Project map mesh vertices onto the surface");
  app.add_option("--max-radius", c.max_radius, "Inverse query reach");
  app.add_option("--point", c.points, "Query point x,y,z (repeatable)");
  app.add_flag("--multi", c.multi, "Multi-valued inverse query");
  app.add_option("--rule", c.rule, "shortest_radius or smallest_phase");
  app.add_option("--sweep-m", c.sweep_m, "Curve counts for the sphere sweep");
  app.add_option("--sweep-h", c.sweep_h, "Step sizes for the sphere sweep");
  app.add_option("--radius", c.radius, "Map radius n*h for the sphere sweep");
  app.add_option("--error-interior", c.error_interior, "Interior error samples");
  app.add_option("--error-boundary", c.error_boundary, "Boundary error samples");
  app.add_option("--input", c.input, "OBJ with texture coordinates");
  app.add_option("--constraint", c.constraints, "Curve constraint x,y,z (repeatable)");
  app.add_option("--segment-samples", c.segment_samples, "Samples per curve segment");
  app.add_option("--sweeps", c.sweeps, "Gauss-Seidel sweeps");
  app.add_option("--threads", c.threads, "Worker thread cap (0: all cores)");
}

int execute(RunConfig& cfg, std::ostream& out) {
  if (cfg.threads >= 0) set_thread_limit(cfg.threads);
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + cfg.out + "'");
  Context ctx{cfg, out, {}, 0, 0, 0};
  if (cfg.command == "param") cmd_param(ctx);
  else if (cfg.command == "trace-dump") cmd_trace_dump(ctx);
  else if (cfg.command == "logmap") cmd_logmap(ctx);
  else if (cfg.command == "error-sphere") cmd_error_sphere(ctx);
  else if (cfg.command == "metrics") cmd_metrics(ctx);
  else if (cfg.command == "curve") cmd_curve(ctx);
  else throw Error(ErrorCode::InvalidConfig, "unknown command '" + cfg.command + "'");
  write_manifest(ctx);
  return 0;
}

int parse_and_run(std::vector<std::string> args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Local surface parameterizations from implicit functions", "geoexp"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", kVersion);
  std::string manifest;
  std::string manifest_out;
  app.add_option("--manifest", manifest, "Re-run the command recorded in a manifest");
  app.add_option("--manifest-out", manifest_out, "Output directory for a manifest re-run");
  app.require_subcommand(0, 1);

  RunConfig cfg;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"param", "Trace, fit and mesh a local map; write OBJ, trace CSV and manifest"},
      {"logmap", "Inverse map queries for --point arguments"},
      {"error-sphere", "Sphere exp-map error sweep"},
      {"metrics", "Distortion energies of a textured OBJ"},
      {"curve", "Closed curve through --constraint points"},
      {"trace-dump", "Write the traced grid as CSV"}};
  for (const auto& [name, help] : commands) add_common(*app.add_subcommand(name, help), cfg);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: InvalidConfig: " << e.what() << '\n';
    return 4;
  }

  if (!manifest.empty()) {
    if (depth > 0) {
      err << "error: InvalidConfig: nested manifest\n";
      return 4;
    }
    std::ifstream in(manifest);
    if (!in) throw Error(ErrorCode::IoError, "cannot open manifest '" + manifest + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, std::string("manifest: ") + e.what());
    }
    std::vector<std::string> replay = j.at("argv").get<std::vector<std::string>>();
    replay.emplace_back("--out");
    replay.push_back(manifest_out.empty() ? fs::path(manifest).parent_path().string() : manifest_out);
    if (replay.back().empty()) replay.back() = ".";
    return parse_and_run(std::move(replay), out, err, depth + 1);
  }

  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  if (cfg.command.empty()) {
    out << app.help();
    return 4;
  }
  return execute(cfg, out);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return parse_and_run(args, out, err, 0);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

} // namespace geoexp
