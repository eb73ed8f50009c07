#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tri-view diffusion recommender toolkit"};
  app.require_subcommand(1);
  tvdiff::cli::register_prepare(app);
  tvdiff::cli::register_train(app);
  tvdiff::cli::register_eval(app);
  tvdiff::cli::register_diagnose(app);
  tvdiff::cli::register_sweep(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;  // runtime error
  }
  return 0;
}
