#pragma once

#include "config.hpp"
#include "output.hpp"

#include <exception>
#include <string>
#include <vector>

namespace slowmf::cli {

enum ExitCode : int { ok = 0, failure = 1, usage = 2, assumption = 3, divergence = 4 };

/// Maps an exception escaping a command to the process exit code.
int exit_code_for(const std::exception& e);

void cmd_paths(const RunConfig& rc, OutputDir& out);
void cmd_manifold(const RunConfig& rc, OutputDir& out);
void cmd_converge(const RunConfig& rc, OutputDir& out);
void cmd_track(const RunConfig& rc, OutputDir& out);
void cmd_estimate(const RunConfig& rc, OutputDir& out);
void cmd_diagnose(const RunConfig& rc, OutputDir& out);

const std::vector<std::string>& command_names();

/// Runs one command end to end (metadata, outputs, timing, manifest).
void run_command(const RunConfig& rc);

/// Full command-line entry point; returns the exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace slowmf::cli
