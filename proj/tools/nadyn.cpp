#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "nadyn/config.hpp"
#include "nadyn/experiments.hpp"
#include "nadyn/interval_maps.hpp"
#include "nadyn/map_sequence.hpp"

namespace {

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  text = buf.str();
  return true;
}

// Config file contents followed by inline key=value pairs.
int assemble(const std::vector<std::string>& args, std::string& text) {
  std::string file_text;
  std::string pairs;
  for (const auto& a : args) {
    if (a.find('=') != std::string::npos) {
      pairs += a + "\n";
    } else if (!file_text.empty()) {
      std::cerr << "config error: more than one config file given\n";
      return nadyn::kExitConfig;
    } else if (!read_file(a, file_text)) {
      std::cerr << "config error: cannot read " << a << '\n';
      return nadyn::kExitConfig;
    }
  }
  const auto first = file_text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && file_text[first] == '{' && !pairs.empty()) {
    std::cerr << "config error: inline key=value pairs cannot extend a JSON config\n";
    return nadyn::kExitConfig;
  }
  text = file_text.empty() ? pairs : file_text + "\n" + pairs;
  return nadyn::kExitOk;
}

int run_batch(const std::string& list_path, unsigned jobs) {
  std::string listing;
  if (!read_file(list_path, listing)) {
    std::cerr << "config error: cannot read " << list_path << '\n';
    return nadyn::kExitConfig;
  }
  std::vector<std::string> paths;
  std::istringstream lines(listing);
  for (std::string line; std::getline(lines, line);) {
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (!line.empty() && line.front() != '#') paths.push_back(line);
  }

  std::vector<std::string> logs(paths.size());
  std::vector<int> codes(paths.size(), nadyn::kExitOk);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < std::max(1u, jobs); ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < paths.size(); i = next++) {
          std::ostringstream log;
          std::string text;
          if (!read_file(paths[i], text)) {
            log << "config error: cannot read " << paths[i] << '\n';
            codes[i] = nadyn::kExitConfig;
          } else {
            codes[i] = nadyn::run_text(text, log);
          }
          logs[i] = log.str();
        }
      });
    }
  }
  int worst = nadyn::kExitOk;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::cout << "[" << paths[i] << "] exit " << codes[i] << '\n' << logs[i];
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-autonomous transfer-operator experiments on interval maps"};
  app.require_subcommand(1);

  std::vector<std::string> run_args;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment from a config file and/or key=value pairs");
  run_cmd->add_option("config", run_args, "Config file (JSON or key=value lines) and inline key=value pairs")
      ->required();

  std::string batch_path;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* batch_cmd = app.add_subcommand("batch", "Run the config files listed one per line, concurrently");
  batch_cmd->add_option("list", batch_path, "File listing config paths")->required();
  batch_cmd->add_option("-j,--jobs", jobs, "Concurrent experiments");

  auto* list_cmd = app.add_subcommand("list", "Show experiments, families and built-in maps");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    std::string text;
    if (const int code = assemble(run_args, text); code != nadyn::kExitOk) return code;
    return nadyn::run_text(text, std::cout);
  }
  if (batch_cmd->parsed()) return run_batch(batch_path, jobs);
  if (list_cmd->parsed()) {
    std::cout << "experiments:";
    for (const auto& e : nadyn::experiment_names()) std::cout << ' ' << e;
    std::cout << "\nfamilies:";
    for (const auto& f : nadyn::family_names()) std::cout << ' ' << f;
    std::cout << "\nmaps:";
    for (const auto& m : nadyn::builtin_map_names()) std::cout << ' ' << m;
    std::cout << '\n';
  }
  return nadyn::kExitOk;
}
