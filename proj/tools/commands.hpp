#pragma once

namespace CLI {
class App;
}

namespace tvdiff::cli {

void register_prepare(CLI::App& app);
void register_train(CLI::App& app);
void register_eval(CLI::App& app);
void register_diagnose(CLI::App& app);
void register_sweep(CLI::App& app);

}  // namespace tvdiff::cli
