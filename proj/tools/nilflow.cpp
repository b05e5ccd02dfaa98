#include "nilflow/commands.hpp"
#include "nilflow/io.hpp"

#include "CLI11.hpp"

#include <clocale>
#include <iostream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_scales(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const double s = nilflow::parse_number(tok);
    if (!(s > 0.0)) throw std::invalid_argument("scales must be positive");
    out.push_back(s);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  // Numbers are formatted with to_chars, but keep any stream output neutral too.
  std::setlocale(LC_ALL, "C");

  CLI::App app{"Reduced generalized Ricci flow on nilpotent circle bundles"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scales_text = "4,16,64";
  nilflow::FamilyRequest fam;

  auto* run = app.add_subcommand("run", "evolve a configuration and write series, snapshots and a report");
  run->add_option("config", config_path, "configuration file")->required();
  auto* verify = app.add_subcommand("verify", "certify the scalar evolution identities on a refinement ladder");
  verify->add_option("config", config_path, "configuration file")->required();
  auto* blowdown = app.add_subcommand("blowdown", "compare parabolic rescalings with the canonical family");
  blowdown->add_option("config", config_path, "configuration file")->required();
  blowdown->add_option("--scales", scales_text, "comma separated rescaling factors")->capture_default_str();
  auto* family = app.add_subcommand("family", "tabulate a member of the canonical family");
  family->add_option("--C", fam.C, "integration constant C >= 0")->capture_default_str();
  family->add_option("--psi0", fam.psi0, "|H^G|^2 at t = 1")->capture_default_str();
  family->add_option("--t0", fam.t0, "first time")->capture_default_str();
  family->add_option("--t1", fam.t1, "last time")->capture_default_str();
  family->add_option("--samples", fam.samples, "number of rows")->capture_default_str();
  auto* init = app.add_subcommand("init", "print a configuration with every key at its default");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) return nilflow::init_command(std::cout);
    if (*family) return nilflow::family_command(fam, std::cout);
    const nilflow::RunConfig cfg = nilflow::load_config(config_path);
    if (*run) return nilflow::run_command(cfg, std::cout);
    if (*verify) return nilflow::verify_command(cfg, std::cout);
    if (*blowdown) return nilflow::blowdown_command(cfg, parse_scales(scales_text), std::cout);
  } catch (const nilflow::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
