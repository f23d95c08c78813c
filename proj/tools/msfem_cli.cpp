// Command-line front end for the multiscale FEM lab.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "msfem/harness.hpp"

namespace {

using msfem::format_double;

int fail(const std::string& stage, const std::string& message) {
  std::cerr << "error: " << (message.starts_with("[") ? message : "[" + stage + "] " + message) << "\n";
  return stage == "config" ? 2 : 3;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

msfem::RunConfig load(const std::string& path, const std::string& output_override) {
  msfem::RunConfig config = msfem::load_config(path);
  if (!output_override.empty()) config.output = output_override;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale finite element lab: MsFEM with oversampling, Type-1/Type-2 bases, homogenization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  int element = -1;

  auto* conv = app.add_subcommand("convergence", "Run a convergence sweep and print the CSV table");
  conv->add_option("config", config_path, "Config file")->required();
  conv->add_option("-o,--output", output, "Override the output path");

  auto* cell = app.add_subcommand("cell", "Solve the cell problems and write kappa_bar and correctors");
  cell->add_option("config", config_path, "Config file")->required();
  cell->add_option("-o,--output", output, "Override the output prefix");

  auto* dump = app.add_subcommand("basis-dump", "Write the intermediate and final bases of one element");
  dump->add_option("config", config_path, "Config file")->required();
  dump->add_option("--element", element, "Coarse element index")->required();
  dump->add_option("-o,--output", output, "Override the output prefix");

  auto* jumps = app.add_subcommand("jumps", "Print per-edge interface jumps");
  jumps->add_option("config", config_path, "Config file")->required();
  jumps->add_option("-o,--output", output, "Also write the table to this path");

  CLI11_PARSE(app, argc, argv);

  try {
    const msfem::RunConfig config = load(config_path, output);
    if (conv->parsed()) {
      const msfem::ConvergenceResult result = msfem::run_convergence(config);
      print_warnings(result.warnings);
      msfem::write_convergence_outputs(config, result);
      std::cout << result.csv;
      std::cerr << result.summary;
    } else if (cell->parsed()) {
      const msfem::CellRunResult result = msfem::run_cell(config);
      const auto& k = result.kappa_bar;
      std::cout << "kappa_bar_xx = " << format_double(k.xx) << "\n"
                << "kappa_bar_xy = " << format_double(k.xy) << "\n"
                << "kappa_bar_yy = " << format_double(k.yy) << "\n"
                << "raw_asymmetry = " << format_double(std::abs(result.raw_matrix[1] - result.raw_matrix[2]))
                << "\n"
                << "cg_iterations = " << result.cell.iterations << "\n";
      for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
    } else if (dump->parsed()) {
      print_warnings(msfem::validate_config(config));
      const msfem::BasisDumpResult result = msfem::run_basis_dump(config, element);
      const auto& b = result.patch.cells;
      std::cout << "element = " << element << "\n"
                << "patch_cells = " << b.i_lo << ' ' << b.i_hi << ' ' << b.j_lo << ' ' << b.j_hi << "\n";
      for (const auto& [type, set] : result.sets) {
        std::cout << msfem::to_string(type) << ".rcond = " << format_double(set.rcond) << "\n";
        for (int q = 0; q < 4; ++q) {
          std::cout << msfem::to_string(type) << ".lagrange_row" << q << " =";
          for (int j = 0; j < 4; ++j) std::cout << ' ' << format_double(set.lagrange(q, j));
          std::cout << "\n";
        }
      }
      for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
    } else if (jumps->parsed()) {
      print_warnings(msfem::validate_config(config));
      const msfem::JumpResult result = msfem::run_jumps(config);
      std::cout << result.csv;
      if (!config.output.empty()) {
        std::FILE* fp = std::fopen(config.output.c_str(), "wb");
        if (fp == nullptr) return fail("output", "cannot open '" + config.output + "'");
        std::fwrite(result.csv.data(), 1, result.csv.size(), fp);
        std::fclose(fp);
      }
    }
  } catch (const msfem::StageError& e) {
    return fail(e.stage(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
