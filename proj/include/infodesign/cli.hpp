#ifndef INFODESIGN_CLI_HPP
#define INFODESIGN_CLI_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace infodesign::cli {

// Exit codes: 0 ok, 2 input error, 3 verification failure, 4 infeasible target.
struct CommandResult {
    int status = 0;
    nlohmann::json summary;
    std::vector<std::string> artifacts;
    std::string error;
};

struct RegionsArgs {
    std::string env_path;
    std::string svg_out;
    std::string csv_out;
    std::vector<double> lambda_grid;  // empty: default grid
};
CommandResult cmd_regions(const RegionsArgs& args);

struct IcdArgs {
    std::string env_path;
    std::string subcommand;       // check | decompose | pstar | binary
    std::vector<double> weights;  // for check
    std::string out_path;         // decompose/pstar artifact
    std::string cdf_csv_out;      // pstar CDF table
};
CommandResult cmd_icd(const IcdArgs& args);

struct ConstructArgs {
    std::string env_path;
    std::string kind;  // any | discrete | garble | us-unique | fb | negative
    double target_pi_b = 0.0;
    double target_pi_s = 0.0;
    bool has_target = false;
    double beta = 1.0;
    double lambda = 1.0;
    double alpha = 0.0;
    double epsilon = 0.05;
    double grid_step = 0.01;
    std::string base_structure_path;  // optional garble base
    std::string base_profile_path;
    std::string out_structure;
    std::string out_profile;
    bool verify = false;
};
CommandResult cmd_construct(const ConstructArgs& args);

struct VerifyArgs {
    std::string env_path;
    std::string structure_path;
    std::string profile_path;
    std::vector<double> sequential_n;  // empty: plain wPBE check
    std::vector<int> tremble_exponents;
    bool price_independent = false;
    double tol = 1e-9;
};
CommandResult cmd_verify(const VerifyArgs& args);

struct ReduceArgs {
    std::string joint_path;
    std::string out_path;
};
CommandResult cmd_reduce(const ReduceArgs& args);

int run(int argc, char** argv);

}  // namespace infodesign::cli

#endif
