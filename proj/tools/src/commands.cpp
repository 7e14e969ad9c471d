#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ogsdeconv/evalkit.hpp"
#include "ogsdeconv/io.hpp"
#include "ogsdeconv/nonblind.hpp"
#include "ogsdeconv/pyramid.hpp"
#include "ogsdeconv/synthetic.hpp"
#include "settings.hpp"

#ifndef OGSDECONV_VERSION
#define OGSDECONV_VERSION "unknown"
#endif

namespace ogsd::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<double> kHistogramEdges = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0};

std::vector<KeySpec> blind_keys() {
  return {
      {"input", ValueKind::text, "", "blurred observation (PGM)"},
      {"dataset", ValueKind::text, "", "dataset directory with index.json; runs every record"},
      {"output-dir", ValueKind::text, "out", "directory for the outputs"},
      {"kernel-size", ValueKind::integer, "", "odd kernel support k"},
      {"lambda1", ValueKind::real, "4.5e-05", "Student's-t weight"},
      {"lambda2", ValueKind::real, "5e-06", "group sparsity weight"},
      {"alpha", ValueKind::real, "1e-18", "Gamma hyperprior shape"},
      {"beta", ValueKind::real, format_real(1.0 / 1700.0), "Gamma hyperprior scale"},
      {"window", ValueKind::integer, "3", "group window W"},
      {"iterations", ValueKind::integer, "4500", "iterations per pyramid level"},
      {"boundary", ValueKind::text, "circular", "circular or symmetric"},
      {"filters", ValueKind::integer, "2", "2 or 4 first-difference filters"},
      {"cg-tol", ValueKind::real, "1e-05", "relative CG tolerance of the image step"},
      {"cg-max-iter", ValueKind::integer, "100", "CG iteration cap of the image step"},
      {"kernel-threshold", ValueKind::real, "0.02", "kernel entries below this fraction of the max are zeroed"},
      {"kernel-domain", ValueKind::text, "intensity", "kernel fit on intensity or gradient"},
      {"recenter", ValueKind::boolean, "true", "recenter the kernel after each level"},
      {"level-init", ValueKind::text, "observation", "latent at each finer level: observation or upsampled"},
      {"lambda", ValueKind::real, "0.001", "weight of the final non-blind restoration"},
      {"profile", ValueKind::text, "", "parameter preset: desk or full"},
  };
}

std::vector<KeySpec> nonblind_keys() {
  return {
      {"input", ValueKind::text, "", "blurred observation (PGM)"},
      {"kernel", ValueKind::text, "", "kernel file"},
      {"output-dir", ValueKind::text, "out", "directory for the outputs"},
      {"lambda", ValueKind::real, "0.001", "prior weight"},
      {"exponent", ValueKind::real, "0.8", "hyper-Laplacian exponent p"},
      {"irls-iters", ValueKind::integer, "15", "reweighting passes"},
      {"boundary", ValueKind::text, "circular", "circular or symmetric"},
      {"filters", ValueKind::integer, "2", "2 or 4 first-difference filters"},
      {"cg-tol", ValueKind::real, "1e-05", "relative CG tolerance"},
      {"cg-max-iter", ValueKind::integer, "200", "CG iteration cap"},
      {"profile", ValueKind::text, "", "parameter preset: desk or full"},
  };
}

std::vector<KeySpec> synth_keys() {
  return {
      {"input", ValueKind::text, "", "sharp image (PGM); overrides --image"},
      {"image", ValueKind::text, "shapes", "builtin sharp image"},
      {"kernel", ValueKind::text, "", "kernel file; overrides --kernel-name"},
      {"kernel-name", ValueKind::text, "motion-diag-9", "builtin kernel"},
      {"size", ValueKind::integer, "64", "side of builtin images"},
      {"noise-sigma", ValueKind::real, "0.01", "Gaussian noise standard deviation"},
      {"seed", ValueKind::integer, "0", "noise seed"},
      {"boundary", ValueKind::text, "circular", "circular or symmetric"},
      {"output-dir", ValueKind::text, "out", "directory for the outputs"},
      {"batch", ValueKind::boolean, "false", "all builtin images x all builtin kernels"},
      {"maxval", ValueKind::integer, "0", "PGM maxval of written images (0: input's, or 65535)"},
      {"profile", ValueKind::text, "", "parameter preset: desk or full"},
  };
}

std::vector<KeySpec> eval_keys() {
  return {
      {"input", ValueKind::text, "", "dataset directory with index.json"},
      {"estimates", ValueKind::text, "", "directory holding <record id>/kernel.txt"},
      {"output-dir", ValueKind::text, "out", "directory for results.json and results.csv"},
      {"lambda", ValueKind::real, "0.001", "non-blind prior weight"},
      {"exponent", ValueKind::real, "0.8", "hyper-Laplacian exponent p"},
      {"crop-border", ValueKind::integer, "-1", "pixels cropped per side (-1: ceil(k/2))"},
      {"boundary", ValueKind::text, "circular", "circular or symmetric"},
      {"filters", ValueKind::integer, "2", "2 or 4 first-difference filters"},
      {"profile", ValueKind::text, "", "parameter preset: desk or full"},
  };
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

json make_manifest(const std::string& command, const Settings& s, json inputs, json outputs) {
  return {{"command", command},          {"version", OGSDECONV_VERSION},
          {"timestamp", utc_timestamp()}, {"config", s.to_json()},
          {"inputs", std::move(inputs)},  {"outputs", std::move(outputs)},
          {"seed", nullptr}};
}

void write_json(const fs::path& path, const json& doc) { io::write_file(path, doc.dump(2) + "\n"); }

BoundaryMode boundary_of(const Settings& s) {
  try {
    return parse_boundary_mode(s.text("boundary"));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("--boundary: ") + e.what());
  }
}

int filters_of(const Settings& s) {
  const int f = s.integer("filters");
  if (f != 2 && f != 4) throw InputError("--filters must be 2 or 4");
  return f;
}

SolverConfig solver_config(const Settings& s) {
  SolverConfig c;
  c.lambda1 = s.real("lambda1");
  c.lambda2 = s.real("lambda2");
  c.prior.alpha = s.real("alpha");
  c.prior.beta = s.real("beta");
  c.window = s.integer("window");
  c.iterations = s.integer("iterations");
  c.boundary = boundary_of(s);
  c.filter_count = filters_of(s);
  c.cg_tol = s.real("cg-tol");
  c.cg_max_iter = s.integer("cg-max-iter");
  c.kernel_threshold = s.real("kernel-threshold");
  try {
    c.kernel_domain = parse_kernel_domain(s.text("kernel-domain"));
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return c;
}

NonblindConfig nonblind_config(const Settings& s) {
  NonblindConfig c;
  c.lambda = s.real("lambda");
  c.boundary = boundary_of(s);
  c.filter_count = filters_of(s);
  if (s.defines("exponent")) c.exponent = s.real("exponent");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return c;
}

io::PgmImage load_image(const fs::path& path) {
  try {
    return io::read_pgm(path);
  } catch (const io::FormatError& e) {
    throw InputError(e.what());
  }
}

Kernel load_kernel(const fs::path& path) {
  try {
    return io::read_kernel(path);
  } catch (const io::FormatError& e) {
    throw InputError(e.what());
  }
}

bool finite_kernel(const Kernel& h) {
  for (double v : h.values())
    if (!std::isfinite(v)) return false;
  return true;
}

struct DatasetRecord {
  std::string id;
  std::string image;
  std::string kernel;
  fs::path sharp;
  fs::path truth_kernel;
  fs::path blurred;
  int kernel_size = 0;
};

std::vector<DatasetRecord> read_index(const fs::path& dir) {
  const fs::path path = dir / "index.json";
  json doc;
  try {
    doc = json::parse(io::read_file(path));
  } catch (const io::FormatError& e) {
    throw InputError(e.what());
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!doc.contains("records") || !doc["records"].is_array())
    throw InputError(path.string() + ": missing records array");
  std::vector<DatasetRecord> out;
  try {
    for (const json& r : doc["records"]) {
      DatasetRecord rec;
      rec.id = r.at("id").get<std::string>();
      rec.image = r.value("image", rec.id);
      rec.kernel = r.value("kernel", std::string{});
      rec.sharp = dir / r.at("sharp").get<std::string>();
      rec.truth_kernel = dir / r.at("truth_kernel").get<std::string>();
      rec.blurred = dir / r.at("blurred").get<std::string>();
      rec.kernel_size = r.at("kernel_size").get<int>();
      out.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": malformed record: " + e.what());
  }
  return out;
}

// ---------------------------------------------------------------- blind

struct TraceRow {
  int level;
  int iteration;
  double objective;
  double kernel_change;
};

json blind_one(const Settings& s, const fs::path& input, int kernel_size, const fs::path& out_dir,
               std::ostream& out, std::ostream& err) {
  const SolverConfig cfg = solver_config(s);
  const NonblindConfig nb = nonblind_config(s);
  if (kernel_size < 3 || kernel_size % 2 == 0)
    throw InputError("--kernel-size must be odd and at least 3");
  const io::PgmImage in = load_image(input);
  const Image& y = in.image;
  if (kernel_size > y.height() || kernel_size > y.width())
    throw InputError("--kernel-size exceeds the image size");

  std::vector<TraceRow> trace;
  int level = 0;
  MultiscaleOptions options;
  options.recenter = s.boolean("recenter");
  try {
    options.level_init = parse_level_init(s.text("level-init"));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("--level-init: ") + e.what());
  }
  options.on_iteration = [&](const IterationReport& r) {
    trace.push_back({level, r.iteration, r.objective, r.kernel_change});
  };
  options.on_level = [&](const LevelReport& r) {
    out << "  level " << r.level << ": " << r.height << "x" << r.width << " k=" << r.kernel_size
        << " objective=" << r.final_objective << '\n';
    ++level;
  };

  const MultiscaleResult res = multiscale_blind_deconv(y, kernel_size, cfg, options);
  if (!res.x.all_finite() || !finite_kernel(res.h))
    throw NumericalError("blind estimation produced non-finite values");
  if (res.flags.kernel_degenerate > 0)
    err << "warning: " << res.flags.kernel_degenerate
        << " kernel steps were degenerate and kept the previous kernel\n";
  if (res.flags.cg_nonconverged > 0)
    err << "warning: " << res.flags.cg_nonconverged
        << " image steps stopped at the CG iteration cap\n";

  Image restored = y;
  if (cfg.iterations > 0) {
    restored = irls_deconv(y, res.h, nb);
    if (!restored.all_finite()) throw NumericalError("non-blind restoration produced non-finite values");
  }

  const fs::path restored_path = out_dir / "restored.pgm";
  const fs::path latent_path = out_dir / "latent.pgm";
  const fs::path kernel_path = out_dir / "kernel.txt";
  const fs::path trace_path = out_dir / "objective_trace.csv";
  const fs::path manifest_path = out_dir / "manifest.json";
  io::write_pgm(restored_path, restored, in.maxval);
  io::write_pgm(latent_path, res.x, in.maxval);
  io::write_kernel(kernel_path, res.h);
  std::ostringstream csv;
  csv << "level,iteration,objective,kernel_change\n" << std::setprecision(17);
  for (const TraceRow& r : trace)
    csv << r.level << ',' << r.iteration << ',' << r.objective << ',' << r.kernel_change << '\n';
  io::write_file(trace_path, csv.str());

  json manifest = make_manifest(
      "blind", s, {{"input", input.string()}},
      {{"restored", restored_path.string()},
       {"latent", latent_path.string()},
       {"kernel", kernel_path.string()},
       {"objective_trace", trace_path.string()},
       {"manifest", manifest_path.string()}});
  manifest["config"]["input"] = input.string();
  manifest["config"]["dataset"] = nullptr;
  manifest["config"]["kernel-size"] = kernel_size;
  manifest["config"]["output-dir"] = out_dir.string();
  manifest["flags"] = {{"cg_nonconverged", res.flags.cg_nonconverged},
                       {"kernel_degenerate", res.flags.kernel_degenerate},
                       {"kernel_line_search", res.flags.kernel_line_search}};
  write_json(manifest_path, manifest);
  return manifest;
}

int cmd_blind(const Settings& s, std::ostream& out, std::ostream& err) {
  const fs::path out_dir = s.text("output-dir");
  if (s.has("dataset")) {
    if (s.has("input")) throw InputError("--input and --dataset are mutually exclusive");
    const fs::path dir = s.text("dataset");
    json runs = json::array();
    for (const DatasetRecord& rec : read_index(dir)) {
      out << rec.id << '\n';
      const int k = s.has("kernel-size") ? s.integer("kernel-size") : rec.kernel_size;
      runs.push_back({{"id", rec.id}, {"manifest", (out_dir / rec.id / "manifest.json").string()}});
      blind_one(s, rec.blurred, k, out_dir / rec.id, out, err);
    }
    json manifest = make_manifest("blind", s, {{"dataset", dir.string()}}, {{"records", runs}});
    write_json(out_dir / "manifest.json", manifest);
    return kExitOk;
  }
  if (!s.has("input")) throw InputError("blind: --input or --dataset is required");
  if (!s.has("kernel-size")) throw InputError("blind: --kernel-size is required");
  blind_one(s, s.text("input"), s.integer("kernel-size"), out_dir, out, err);
  out << "wrote " << (out_dir / "restored.pgm").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- nonblind

int cmd_nonblind(const Settings& s, std::ostream& out, std::ostream&) {
  if (!s.has("input") || !s.has("kernel")) throw InputError("nonblind: --input and --kernel are required");
  NonblindConfig cfg = nonblind_config(s);
  cfg.irls_iters = s.integer("irls-iters");
  cfg.cg_tol = s.real("cg-tol");
  cfg.cg_max_iter = s.integer("cg-max-iter");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const io::PgmImage in = load_image(s.text("input"));
  const Kernel h = load_kernel(s.text("kernel"));
  if (h.size() > in.image.height() || h.size() > in.image.width())
    throw InputError("kernel exceeds the image size");

  const NonblindResult res = irls_deconv_detailed(in.image, h, cfg);
  if (!res.x.all_finite()) throw NumericalError("restoration produced non-finite values");

  const fs::path out_dir = s.text("output-dir");
  const fs::path restored_path = out_dir / "restored.pgm";
  const fs::path trace_path = out_dir / "objective_trace.csv";
  const fs::path manifest_path = out_dir / "manifest.json";
  io::write_pgm(restored_path, res.x, in.maxval);
  std::ostringstream csv;
  csv << "pass,objective\n" << std::setprecision(17);
  for (std::size_t i = 0; i < res.objective_trace.size(); ++i)
    csv << i << ',' << res.objective_trace[i] << '\n';
  io::write_file(trace_path, csv.str());
  json manifest = make_manifest("nonblind", s, {{"input", s.text("input")}, {"kernel", s.text("kernel")}},
                                {{"restored", restored_path.string()},
                                 {"objective_trace", trace_path.string()},
                                 {"manifest", manifest_path.string()}});
  manifest["cg_nonconverged"] = res.cg_nonconverged;
  write_json(manifest_path, manifest);
  out << "wrote " << restored_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Settings& s, std::ostream& out, std::ostream&) {
  const fs::path out_dir = s.text("output-dir");
  const double sigma = s.real("noise-sigma");
  if (sigma < 0.0) throw InputError("--noise-sigma must be nonnegative");
  const int seed_value = s.integer("seed");
  if (seed_value < 0) throw InputError("--seed must be nonnegative");
  const auto seed = static_cast<std::uint64_t>(seed_value);
  const BoundaryMode mode = boundary_of(s);
  const int size = s.integer("size");
  if (size < 3) throw InputError("--size must be at least 3");
  const int maxval_opt = s.integer("maxval");
  if (maxval_opt < 0 || maxval_opt > 65535) throw InputError("--maxval must be in 0..65535");

  if (s.boolean("batch")) {
    const int maxval = maxval_opt > 0 ? maxval_opt : 65535;
    json records = json::array();
    for (const std::string& kernel_name : synthetic::builtin_kernel_names()) {
      const Kernel h = synthetic::builtin_kernel(kernel_name);
      if (h.size() > size) throw InputError("--size is smaller than the builtin kernels");
      io::write_kernel(out_dir / ("kernels/" + kernel_name + ".txt"), h);
    }
    std::uint64_t index = 0;
    for (const std::string& image_name : synthetic::builtin_image_names()) {
      const Image x = synthetic::builtin_image(image_name, size, size);
      const std::string sharp_rel = "sharp/" + image_name + ".pgm";
      io::write_pgm(out_dir / sharp_rel, x, maxval);
      for (const std::string& kernel_name : synthetic::builtin_kernel_names()) {
        const Kernel h = synthetic::builtin_kernel(kernel_name);
        const std::string kernel_rel = "kernels/" + kernel_name + ".txt";
        const std::string id = image_name + "__" + kernel_name;
        const std::string blurred_rel = "blurred/" + id + ".pgm";
        const std::uint64_t record_seed = seed + index++;
        io::write_pgm(out_dir / blurred_rel, synth_blur(x, h, sigma, record_seed, mode), maxval);
        records.push_back({{"id", id},
                           {"image", image_name},
                           {"kernel", kernel_name},
                           {"sharp", sharp_rel},
                           {"truth_kernel", kernel_rel},
                           {"blurred", blurred_rel},
                           {"kernel_size", h.size()},
                           {"seed", record_seed}});
      }
    }
    const json index_doc = {{"noise_sigma", sigma},
                            {"noise_generator", kNoiseGeneratorId},
                            {"records", records}};
    write_json(out_dir / "index.json", index_doc);
    json manifest = make_manifest("synth", s, json::object(),
                                  {{"index", (out_dir / "index.json").string()},
                                   {"manifest", (out_dir / "manifest.json").string()}});
    manifest["seed"] = seed;
    manifest["noise_generator"] = kNoiseGeneratorId;
    write_json(out_dir / "manifest.json", manifest);
    out << "wrote " << records.size() << " observations to " << out_dir.string() << '\n';
    return kExitOk;
  }

  Image x;
  int source_maxval = 65535;
  json inputs = json::object();
  if (s.has("input")) {
    io::PgmImage in = load_image(s.text("input"));
    x = std::move(in.image);
    source_maxval = in.maxval;
    inputs["input"] = s.text("input");
  } else {
    try {
      x = synthetic::builtin_image(s.text("image"), size, size);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  Kernel h;
  if (s.has("kernel")) {
    h = load_kernel(s.text("kernel"));
    inputs["kernel"] = s.text("kernel");
  } else {
    try {
      h = synthetic::builtin_kernel(s.text("kernel-name"));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  if (h.size() > x.height() || h.size() > x.width()) throw InputError("kernel exceeds the image size");
  const int maxval = maxval_opt > 0 ? maxval_opt : source_maxval;

  const fs::path blurred_path = out_dir / "blurred.pgm";
  const fs::path sharp_path = out_dir / "sharp.pgm";
  const fs::path kernel_path = out_dir / "kernel.txt";
  const fs::path manifest_path = out_dir / "manifest.json";
  io::write_pgm(blurred_path, synth_blur(x, h, sigma, seed, mode), maxval);
  io::write_pgm(sharp_path, x, maxval);
  io::write_kernel(kernel_path, h);
  json manifest = make_manifest("synth", s, inputs,
                                {{"blurred", blurred_path.string()},
                                 {"sharp", sharp_path.string()},
                                 {"kernel", kernel_path.string()},
                                 {"manifest", manifest_path.string()}});
  manifest["seed"] = seed;
  manifest["noise_generator"] = kNoiseGeneratorId;
  write_json(manifest_path, manifest);
  out << "wrote " << blurred_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const Settings& s, std::ostream& out, std::ostream& err) {
  if (!s.has("input")) throw InputError("eval: --input (dataset directory) is required");
  if (!s.has("estimates")) throw InputError("eval: --estimates is required");
  const fs::path dataset = s.text("input");
  const fs::path estimates = s.text("estimates");
  const NonblindConfig nb = nonblind_config(s);
  const int crop_opt = s.integer("crop-border");
  const auto started = std::chrono::steady_clock::now();

  json records = json::array();
  json missing = json::array();
  std::vector<double> ratios;
  std::ostringstream csv;
  csv << "id,ssd,ssd_ratio\n" << std::setprecision(17);
  for (const DatasetRecord& rec : read_index(dataset)) {
    const fs::path est_path = estimates / rec.id / "kernel.txt";
    if (!fs::exists(est_path)) {
      err << "warning: no estimate for " << rec.id << " (" << est_path.string() << ")\n";
      missing.push_back(rec.id);
      continue;
    }
    const Image truth = load_image(rec.sharp).image;
    const Image y = load_image(rec.blurred).image;
    const Kernel h_true = load_kernel(rec.truth_kernel);
    const Kernel h_est = load_kernel(est_path);
    const int crop =
        crop_opt >= 0 ? crop_opt : default_crop_border(std::max(h_true.size(), h_est.size()));
    const Image x_est = irls_deconv(y, h_est, nb);
    const Image x_gt = irls_deconv(y, h_true, nb);
    if (!x_est.all_finite() || !x_gt.all_finite())
      throw NumericalError("restoration of " + rec.id + " produced non-finite values");

    EvalRecord r;
    r.image_id = rec.image;
    r.kernel_id = rec.kernel;
    r.ssd = ssd(x_est, truth, crop);
    const SsdRatio ratio = ssd_ratio(x_est, x_gt, truth, crop);
    r.ssd_ratio = ratio.value;
    r.degenerate_denominator = ratio.degenerate;
    r.kernel_similarity = kernel_similarity(h_est, h_true);
    ratios.push_back(r.ssd_ratio);
    records.push_back({{"id", rec.id},
                       {"image_id", r.image_id},
                       {"kernel_id", r.kernel_id},
                       {"ssd", r.ssd},
                       {"ssd_ratio", r.ssd_ratio},
                       {"kernel_similarity", r.kernel_similarity},
                       {"degenerate_denominator", r.degenerate_denominator},
                       {"crop_border", crop}});
    csv << rec.id << ',' << r.ssd << ',' << r.ssd_ratio << '\n';
    out << std::left << std::setw(32) << rec.id << " ssd=" << r.ssd << " ratio=" << r.ssd_ratio
        << '\n';
  }
  if (ratios.empty()) throw InputError("eval: no record had an estimate");

  const std::vector<double> fractions = cumulative_histogram(ratios, kHistogramEdges);
  out << "ssd ratio <= edge : fraction\n";
  for (std::size_t i = 0; i < kHistogramEdges.size(); ++i)
    out << "  " << std::setw(4) << kHistogramEdges[i] << " : " << fractions[i] << '\n';

  const fs::path out_dir = s.text("output-dir");
  const fs::path results_path = out_dir / "results.json";
  const fs::path csv_path = out_dir / "results.csv";
  json manifest = make_manifest("eval", s, {{"dataset", dataset.string()}, {"estimates", estimates.string()}},
                                {{"results", results_path.string()}, {"csv", csv_path.string()}});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const json results = {{"manifest", manifest},
                        {"records", records},
                        {"histogram", {{"edges", kHistogramEdges}, {"fractions", fractions}}},
                        {"missing", missing},
                        {"wall_clock_seconds", seconds}};
  write_json(results_path, results);
  io::write_file(csv_path, csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------- dispatch

struct Command {
  std::string name;
  std::string description;
  std::vector<KeySpec> keys;
  int (*handler)(const Settings&, std::ostream&, std::ostream&);
  CLI::App* app = nullptr;
  std::map<std::string, std::string> raw;
  std::map<std::string, bool> raw_flags;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  std::string manifest_path;
};

Settings resolve(Command& cmd) {
  Layer flags;
  for (const KeySpec& k : cmd.keys) {
    if (cmd.options[k.name]->count() == 0) continue;
    flags[k.name] = k.kind == ValueKind::boolean ? (cmd.raw_flags[k.name] ? "true" : "false")
                                                 : cmd.raw[k.name];
  }
  if (!cmd.config_path.empty() && !cmd.manifest_path.empty())
    throw InputError("--config and --manifest are mutually exclusive");
  Layer config;
  if (!cmd.config_path.empty()) config = load_config_layer(cmd.config_path, cmd.keys);
  if (!cmd.manifest_path.empty()) config = load_manifest_layer(cmd.manifest_path, cmd.name, cmd.keys);
  const Settings bare(cmd.keys, flags, config, {});
  return Settings(cmd.keys, flags, config, profile_preset(bare.text("profile"), cmd.name));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blind deconvolution with Student's-t and overlapping group sparsity priors",
               "ogsdeconv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", OGSDECONV_VERSION);

  std::vector<Command> commands;
  commands.push_back({"blind", "estimate kernel and sharp image from a blurred observation",
                      blind_keys(), cmd_blind});
  commands.push_back({"nonblind", "restore with a known kernel", nonblind_keys(), cmd_nonblind});
  commands.push_back({"synth", "generate blurred, noisy observations", synth_keys(), cmd_synth});
  commands.push_back({"eval", "SSD and SSD-ratio evaluation over a dataset", eval_keys(), cmd_eval});

  for (Command& cmd : commands) {
    cmd.app = app.add_subcommand(cmd.name, cmd.description);
    for (const KeySpec& k : cmd.keys) {
      std::string help = k.help;
      if (!k.fallback.empty()) help += " [" + k.fallback + "]";
      cmd.options[k.name] = k.kind == ValueKind::boolean
                                ? cmd.app->add_flag("--" + k.name + ",!--no-" + k.name,
                                                    cmd.raw_flags[k.name], help)
                                : cmd.app->add_option("--" + k.name, cmd.raw[k.name], help);
    }
    cmd.app->add_option("--config", cmd.config_path, "key=value file (keys are flag names)");
    cmd.app->add_option("--manifest", cmd.manifest_path, "rerun with the configuration of a manifest");
  }

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("ogsdeconv");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  for (Command& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      return cmd.handler(resolve(cmd), out, err);
    } catch (const InputError& e) {
      err << "error: " << e.what() << '\n';
      return kExitInput;
    } catch (const io::FormatError& e) {
      err << "error: " << e.what() << '\n';
      return kExitInput;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kExitInput;
    } catch (const NumericalError& e) {
      err << "numerical failure: " << e.what() << '\n';
      return kExitNumerical;
    } catch (const std::exception& e) {
      err << "numerical failure: " << e.what() << '\n';
      return kExitNumerical;
    }
  }
  return kExitInput;
}

}  // namespace ogsd::cli
