// sdqz: command-line front end for the error-bounded compressor.
//
//   sdqz compress   -i field.f32 --dims 100x500x500 --mode valrel --eb 1e-4 -o field.sdqz
//   sdqz decompress -i field.sdqz -o field.out.f32
//   sdqz analyze    -i field.f32 -r field.out.f32 --dims 100x500x500
//   sdqz sweep      -i field.f32 --dims 100x500x500 --eb 1e-2,1e-3,1e-4
//   sdqz gen        --profile smooth --dims 64x64x64 --seed 7 -o field.f32
//
// stdout carries machine-readable output only; diagnostics go to stderr.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdqz/sdqz.hpp"

namespace {

struct CliConfig {
  std::string input;
  std::string output;
  std::string recon;
  std::string dims;
  std::string dtype = "f32";
  std::string mode = "valrel";
  std::vector<double> ebs;
  std::uint32_t cap = sdqz::kDefaultCap;
  std::uint32_t chunk_size = 0;
  std::optional<unsigned> threads;
  std::string profile;
  std::uint64_t seed = 1;
  double value = 0.0;
};

unsigned resolve_threads(const std::optional<unsigned>& flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("SDQZ_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    throw sdqz::Error(sdqz::Errc::invalid_argument, std::string("invalid SDQZ_THREADS value '") + env + "'");
  }
  return sdqz::hardware_threads();
}

sdqz::ErrorBoundSpec make_spec(const std::string& mode, double eb) {
  if (mode == "abs") return sdqz::ErrorBoundSpec::absolute(eb);
  if (mode == "valrel") return sdqz::ErrorBoundSpec::valrel(eb);
  throw sdqz::Error(sdqz::Errc::invalid_argument, "unknown mode '" + mode + "'; use abs or valrel");
}

bool is_f64(const std::string& dtype) {
  if (dtype == "f32") return false;
  if (dtype == "f64") return true;
  throw sdqz::Error(sdqz::Errc::invalid_argument, "unknown dtype '" + dtype + "'; use f32 or f64");
}

double eb_of(const CliConfig& cfg) {
  if (cfg.ebs.size() != 1)
    throw sdqz::Error(sdqz::Errc::invalid_argument, "exactly one --eb value is required");
  return cfg.ebs.front();
}

template <class T>
std::vector<T> load_field(const std::string& path, const sdqz::Dims& dims) {
  auto values = sdqz::read_raw<T>(path);
  std::size_t want = sdqz::checked_volume(sdqz::fold_to_3d(dims));
  if (values.size() != want)
    throw sdqz::Error(sdqz::Errc::length_mismatch,
                      "input '" + path + "' has " + std::to_string(values.size()) + " values but dims " +
                          sdqz::dims_to_string(dims) + " imply " + std::to_string(want));
  return values;
}

template <class T>
int compress_typed(const CliConfig& cfg) {
  sdqz::Dims dims = sdqz::parse_dims(cfg.dims);
  auto values = load_field<T>(cfg.input, dims);
  auto spec = make_spec(cfg.mode, eb_of(cfg));
  auto start = std::chrono::steady_clock::now();
  auto c = sdqz::compress<T>(values, sdqz::fold_to_3d(dims), spec,
                             {cfg.cap, cfg.chunk_size, resolve_threads(cfg.threads)});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  sdqz::write_file(cfg.output, c.bytes);
  auto size = sdqz::size_report(c.field, c.bytes.size(), sizeof(T) * 8);
  std::cout << "cr=" << sdqz::format_number(size.compression_ratio)
            << " bitrate=" << sdqz::format_number(size.bitrate)
            << " outliers_pct=" << sdqz::format_number(100.0 * c.n_outliers / c.field.n_points)
            << " eb=" << sdqz::format_number(c.eb) << " bytes=" << c.bytes.size()
            << " time_s=" << sdqz::format_number(secs) << '\n';
  return 0;
}

int cmd_compress(const CliConfig& cfg) {
  return is_f64(cfg.dtype) ? compress_typed<double>(cfg) : compress_typed<float>(cfg);
}

int cmd_decompress(const CliConfig& cfg) {
  if (!cfg.dims.empty())
    throw sdqz::Error(sdqz::Errc::invalid_argument, "--dims is not accepted for archive input; archives are self-describing");
  auto bytes = sdqz::read_file(cfg.input);
  auto field = sdqz::decompress(bytes, resolve_threads(cfg.threads));
  std::vector<std::uint8_t> raw = std::visit(
      [](const auto& v) { return sdqz::encode_raw(std::span(v)); }, field.values);
  sdqz::write_file(cfg.output, raw);
  std::cout << "bytes=" << raw.size() << " dims=" << sdqz::dims_to_string(field.dims)
            << " dtype=" << (field.dtype == sdqz::DType::f32 ? "f32" : "f64") << '\n';
  return 0;
}

template <class T>
int analyze_typed(const CliConfig& cfg) {
  sdqz::Dims dims = sdqz::parse_dims(cfg.dims);
  auto orig = load_field<T>(cfg.input, dims);
  auto recon = load_field<T>(cfg.recon, dims);
  auto q = sdqz::quality<T>(orig, recon);
  std::cout << "psnr_db=" << sdqz::format_number(q.psnr) << " rmse=" << sdqz::format_number(q.rmse)
            << " max_abs_err=" << sdqz::format_number(q.max_abs_error)
            << " range=" << sdqz::format_number(q.value_range) << '\n';
  return 0;
}

int cmd_analyze(const CliConfig& cfg) {
  return is_f64(cfg.dtype) ? analyze_typed<double>(cfg) : analyze_typed<float>(cfg);
}

template <class T>
int sweep_typed(const CliConfig& cfg) {
  sdqz::Dims dims = sdqz::parse_dims(cfg.dims);
  auto values = load_field<T>(cfg.input, dims);
  std::vector<sdqz::ErrorBoundSpec> specs;
  for (double eb : cfg.ebs) specs.push_back(make_spec(cfg.mode, eb));
  auto rows = sdqz::rd_sweep<T>(values, sdqz::fold_to_3d(dims), specs, cfg.cap, resolve_threads(cfg.threads));

  std::size_t ok = 0;
  for (const auto& r : rows) {
    if (r.error)
      std::cerr << "sweep: eb " << sdqz::format_number(r.spec.magnitude) << " failed: " << *r.error << '\n';
    else
      ++ok;
  }
  std::ostringstream csv;
  sdqz::write_sweep_csv(csv, rows);
  if (cfg.output.empty()) {
    std::cout << csv.str();
  } else {
    std::string s = csv.str();
    sdqz::write_file(cfg.output, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }
  return ok > 0 ? 0 : 1;
}

int cmd_sweep(const CliConfig& cfg) {
  if (cfg.ebs.empty()) throw sdqz::Error(sdqz::Errc::invalid_argument, "sweep needs at least one --eb value");
  return is_f64(cfg.dtype) ? sweep_typed<double>(cfg) : sweep_typed<float>(cfg);
}

int cmd_gen(const CliConfig& cfg) {
  sdqz::Profile profile = sdqz::parse_profile(cfg.profile);
  sdqz::Dims dims = sdqz::fold_to_3d(sdqz::parse_dims(cfg.dims));
  sdqz::SynthOptions opt;
  opt.seed = cfg.seed;
  opt.value = cfg.value;
  std::size_t bytes = 0;
  if (is_f64(cfg.dtype)) {
    auto v = sdqz::generate_field<double>(profile, dims, opt);
    sdqz::write_raw<double>(cfg.output, v);
    bytes = v.size() * sizeof(double);
  } else {
    auto v = sdqz::generate_field<float>(profile, dims, opt);
    sdqz::write_raw<float>(cfg.output, v);
    bytes = v.size() * sizeof(float);
  }
  std::cout << "bytes=" << bytes << " profile=" << sdqz::profile_name(profile) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-bounded lossy compressor for floating-point arrays"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "Worker threads (default: $SDQZ_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
  };
  auto add_dtype = [&](CLI::App* sub) {
    sub->add_option("--dtype", cfg.dtype, "Element type of raw files: f32 or f64")->capture_default_str();
  };

  auto* compress = app.add_subcommand("compress", "Compress a raw little-endian array into an .sdqz archive");
  compress->add_option("-i,--input", cfg.input, "Raw input file")->required();
  compress->add_option("-o,--output", cfg.output, "Archive output file")->required();
  compress->add_option("--dims", cfg.dims, "Extents, slowest axis first, e.g. 100x500x500")->required();
  add_dtype(compress);
  compress->add_option("--mode", cfg.mode, "Error-bound mode: abs or valrel")->capture_default_str();
  compress->add_option("--eb", cfg.ebs, "Error bound magnitude")->required()->expected(1);
  compress->add_option("--cap", cfg.cap, "Number of quantization bins (power of two)")->capture_default_str();
  compress->add_option("--chunk-size", cfg.chunk_size, "Codes per deflate chunk (0 = automatic)");
  add_threads(compress);

  auto* decompress = app.add_subcommand("decompress", "Reconstruct a raw array from an .sdqz archive");
  decompress->add_option("-i,--input", cfg.input, "Archive input file")->required();
  decompress->add_option("-o,--output", cfg.output, "Raw output file")->required();
  decompress->add_option("--dims", cfg.dims, "Not accepted: archives carry their own dims");
  add_threads(decompress);

  auto* analyze = app.add_subcommand("analyze", "Compare an original and a reconstructed raw array");
  analyze->add_option("-i,--input", cfg.input, "Original raw file")->required();
  analyze->add_option("-r,--recon", cfg.recon, "Reconstructed raw file")->required();
  analyze->add_option("--dims", cfg.dims, "Extents, slowest axis first")->required();
  add_dtype(analyze);

  auto* sweep = app.add_subcommand("sweep", "Rate-distortion sweep over a list of error bounds (CSV)");
  sweep->add_option("-i,--input", cfg.input, "Raw input file")->required();
  sweep->add_option("-o,--output", cfg.output, "CSV output file (default: stdout)");
  sweep->add_option("--dims", cfg.dims, "Extents, slowest axis first")->required();
  add_dtype(sweep);
  sweep->add_option("--mode", cfg.mode, "Error-bound mode: abs or valrel")->capture_default_str();
  sweep->add_option("--eb", cfg.ebs, "Error bounds, comma separated or repeated")->required()->delimiter(',');
  sweep->add_option("--cap", cfg.cap, "Number of quantization bins (power of two)")->capture_default_str();
  add_threads(sweep);

  auto* gen = app.add_subcommand("gen", "Write a synthetic raw field");
  gen->add_option("--profile", cfg.profile, "One of: " + sdqz::profile_list())->required();
  gen->add_option("--dims", cfg.dims, "Extents, slowest axis first")->required();
  gen->add_option("-o,--output", cfg.output, "Raw output file")->required();
  add_dtype(gen);
  gen->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  gen->add_option("--value", cfg.value, "Value for the constant profile")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*compress) return cmd_compress(cfg);
    if (*decompress) return cmd_decompress(cfg);
    if (*analyze) return cmd_analyze(cfg);
    if (*sweep) return cmd_sweep(cfg);
    if (*gen) return cmd_gen(cfg);
  } catch (const sdqz::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
