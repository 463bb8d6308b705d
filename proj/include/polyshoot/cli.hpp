#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "polyshoot/model.hpp"
#include "polyshoot/shooting.hpp"

namespace polyshoot::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kSolverFailure = 2, kVerificationFailure = 3 };

/// Entry point of the polyshoot tool.
int run(int argc, char** argv);
/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args);

std::string sha256_hex(std::string_view data);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// (-Delta)^alpha (1 - r^2)^alpha, a constant.
double manufactured_constant(int alpha, int dimension);
/// Dirichlet problem of order alpha with that constant right-hand side.
ProblemSpec manufactured_problem(int alpha, int dimension);
/// sup over the grid of |u - (1 - r^2)^alpha|.
double manufactured_error(const SolutionRecord& rec);

/// Reads a solution JSON written by `solve` (profile CSV path relative to it).
SolutionRecord load_solution(const std::filesystem::path& json_path);

}  // namespace polyshoot::cli
