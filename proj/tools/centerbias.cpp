// centerbias <command> --config <path> [options]
//
// Runs one experiment and writes its table as CSV or JSON to --out (or the
// config's output.path, or stdout).

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "centerbias/centerbias.hpp"

namespace {

std::optional<centerbias::cplx> parse_s(const std::string& text) {
  if (text.empty() || text == "center") return std::nullopt;
  double re = 0.0, im = 0.0;
  const auto comma = text.find(',');
  const std::string a = text.substr(0, comma);
  auto r = std::from_chars(a.data(), a.data() + a.size(), re);
  if (r.ec != std::errc{} || r.ptr != a.data() + a.size()) {
    throw centerbias::ValidationError("--s expects <re>[,<im>] or 'center'");
  }
  if (comma != std::string::npos) {
    const std::string b = text.substr(comma + 1);
    r = std::from_chars(b.data(), b.data() + b.size(), im);
    if (r.ec != std::errc{} || r.ptr != b.data() + b.size()) {
      throw centerbias::ValidationError("--s expects <re>[,<im>] or 'center'");
    }
  }
  return centerbias::cplx{re, im};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial Euler products and prime biases at the centre"};
  app.require_subcommand(1, 1);

  std::string config_path, s_text, out_path, format, tau_cache = "tau_cache.bin";
  std::optional<double> T;
  unsigned threads = 1;

  const char* commands[][2] = {
      {"bias", "bias series Σ a(p)/√p with log log x fit"},
      {"product", "partial Euler product against its limiting constant"},
      {"explicit", "truncated explicit formula, term by term"},
      {"race", "weighted prime race π_s(x;q,a) - π_s(x;q,b)"},
      {"goldfeld", "∏ N_p/p for an elliptic curve"},
      {"psi", "Chebyshev function ψ(x, π) and growth ratios"},
      {"fit", "log log x fits of the bias and second-moment series"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--s", s_text, "evaluation point <re>[,<im>] or 'center'");
    sub->add_option("--T", T, "zero height for explicit");
    sub->add_option("--out", out_path, "output file (default: config output.path, else stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--tau-cache", tau_cache, "τ table cache file");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const auto config = centerbias::load_config(config_path);
    centerbias::RunOptions opts;
    opts.threads = threads;
    opts.tau_cache = tau_cache;
    opts.s = parse_s(s_text);
    opts.T = T;
    const auto table = centerbias::run_command(command, config, opts);

    if (format.empty()) format = config.output_format.value_or(command == "explicit" ? "json" : "csv");
    if (out_path.empty() && config.output_path) out_path = *config.output_path;
    const std::string text = format == "json"
                                 ? centerbias::render_json(table, centerbias::run_meta(config, command))
                                 : centerbias::render_csv(table);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw centerbias::Error("cannot write " + out_path);
      out << text;
    }
  } catch (const std::exception& e) {
    std::cerr << "centerbias " << command << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
