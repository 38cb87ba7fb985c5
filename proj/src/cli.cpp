#include "infodesign/cli.hpp"

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "infodesign/construct.hpp"
#include "infodesign/environment.hpp"
#include "infodesign/equilibrium.hpp"
#include "infodesign/geometry.hpp"
#include "infodesign/icd.hpp"

namespace infodesign::cli {

namespace {

void write_file(CommandResult& result, const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << content;
    result.artifacts.push_back(path);
}

void write_json(CommandResult& result, const std::string& path, const nlohmann::json& j) {
    write_file(result, path, j.dump(2) + "\n");
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("cannot parse " + path + ": " + e.what());
    }
    return j;
}

template <typename Fn>
CommandResult guarded(Fn&& fn) {
    CommandResult result;
    result.summary = nlohmann::json::object();
    try {
        fn(result);
    } catch (const infeasible_error& e) {
        result.status = 4;
        result.error = e.what();
    } catch (const input_error& e) {
        result.status = 2;
        result.error = e.what();
    } catch (const std::exception& e) {
        result.status = 2;
        result.error = e.what();
    }
    return result;
}

nlohmann::json payoff_json(PayoffPoint p) { return {p.pi_b, p.pi_s}; }

}  // namespace

CommandResult cmd_regions(const RegionsArgs& args) {
    return guarded([&](CommandResult& result) {
        const Environment env = load_environment_file(args.env_path);
        result.summary["surplus"] = surplus(env);
        result.summary["gains_from_trade"] = env.gains_from_trade;

        std::vector<PayoffRegion> regions;
        if (env.gains_from_trade) {
            const double guarantee = seller_guarantee(env);
            const UsFloor us = seller_floor_us(env);
            const FbFloor fb = seller_floor_fb(env);
            result.summary["floors"] = {guarantee, us.value, fb.value};
            result.summary["floor_us_exact"] = us.exact;
            result.summary["fb_prices"] = fb.prices;
            regions = {region_all(env), region_us(env), region_fb(env)};
        } else {
            regions = {region_negative(env, args.lambda_grid.empty() ? default_lambda_grid()
                                                                     : args.lambda_grid)};
            result.summary["pi_hat_s"] = pi_hat_s(env);
            result.summary["seller_guarantee"] = seller_guarantee(env);
        }
        nlohmann::json region_list = nlohmann::json::array();
        for (const auto& r : regions) region_list.push_back(to_json(r));
        result.summary["regions"] = region_list;

        if (!args.csv_out.empty()) write_file(result, args.csv_out, region_to_csv(regions.front()));
        if (!args.svg_out.empty()) {
            std::vector<PayoffRegion> figure = regions;
            if (!env.gains_from_trade) {
                // Overlay the efficient-trade triangle above pi_hat_s.
                const double hat = pi_hat_s(env);
                const double s1 = s_lambda(env, 1.0);
                if (s1 - hat > 1e-12) {
                    PayoffRegion tri;
                    tri.kind = PayoffRegion::Kind::triangle_all;
                    tri.vertices = {{0.0, s1}, {0.0, hat}, {s1 - hat, hat}};
                    figure.push_back(tri);
                }
            }
            write_file(result, args.svg_out, regions_to_svg(figure));
        }
    });
}

CommandResult cmd_icd(const IcdArgs& args) {
    return guarded([&](CommandResult& result) {
        const Environment env = load_environment_file(args.env_path);
        if (args.subcommand == "check") {
            const Belief nu = make_belief(env, args.weights);
            const IcdTest test = is_icd(env, nu);
            result.summary["is_icd"] = test.is_icd;
            result.summary["constant"] = test.constant;
            result.summary["opt_prices"] = seller_opt_prices(env, nu);
        } else if (args.subcommand == "decompose") {
            const IcdDecomposition d = icd_decompose(env);
            result.summary = to_json(d);
            if (!args.out_path.empty()) write_json(result, args.out_path, to_json(d));
        } else if (args.subcommand == "pstar") {
            const AffineCosts ac = detect_affine_costs(env);
            if (!ac.affine)
                throw input_error(
                    "pstar requires affine costs: use `regions` for the searched bound");
            const PStarResult ps = affine_p_star(env);
            result.summary["p_star"] = ps.p_star;
            result.summary["pi_us"] = ps.pi_us;
            result.summary["clamped"] = ps.clamped;
            result.summary["witness"] = to_json(ps.witness);
            if (!args.out_path.empty()) write_json(result, args.out_path, to_json(ps.witness));
            if (!args.cdf_csv_out.empty())
                write_file(result, args.cdf_csv_out, affine_icd_cdf_csv(ps.witness));
        } else if (args.subcommand == "binary") {
            const BinaryPResult bp = binary_p(env);
            result.summary["p"] = bp.price;
            result.summary["pi_us"] = bp.pi_us;
            result.summary["from_fallback"] = bp.from_fallback;
        } else {
            throw input_error("unknown icd subcommand: " + args.subcommand);
        }
    });
}

CommandResult cmd_construct(const ConstructArgs& args) {
    return guarded([&](CommandResult& result) {
        const Environment env = load_environment_file(args.env_path);
        const PayoffPoint target{args.target_pi_b, args.target_pi_s};

        InformationStructure structure;
        StrategyProfile profile;
        bool sequential = false;
        TrembleSchedule trembles;

        if (args.kind == "any") {
            if (!args.has_target) throw input_error("construct any: --target required");
            Constructed c = construct_any(env, target);
            structure = std::move(c.structure);
            profile = std::move(c.profile);
        } else if (args.kind == "fb") {
            Constructed c = construct_fb(env, args.beta);
            structure = std::move(c.structure);
            profile = std::move(c.profile);
        } else if (args.kind == "garble") {
            if (!args.has_target) throw input_error("construct garble: --target required");
            Constructed base;
            if (!args.base_structure_path.empty()) {
                base.structure = structure_from_json(load_json_file(args.base_structure_path));
                base.profile = profile_from_json(load_json_file(args.base_profile_path));
            } else {
                base = akerlof(env);
            }
            Garbled g = garble_to_target(env, base.structure, base.profile, target);
            structure = std::move(g.structure);
            profile = std::move(g.profile);
            result.summary["diagnostics"] = {{"z_star", std::isfinite(g.diagnostics.z_star)
                                                            ? nlohmann::json(g.diagnostics.z_star)
                                                            : nlohmann::json("-inf")},
                                             {"beta", g.diagnostics.beta},
                                             {"p_star", g.diagnostics.p_star},
                                             {"pool_fraction", g.diagnostics.pool_fraction}};
        } else if (args.kind == "us-unique") {
            if (!args.has_target) throw input_error("construct us-unique: --target required");
            UniqueConstructed u = construct_us_unique(env, target);
            structure = std::move(u.structure);
            profile = std::move(u.profile);
            result.summary["base_payoff"] = u.base_payoff;
            result.summary["sweep_max_other"] = u.sweep_max_other;
            result.summary["p_star"] = u.diagnostics.p_star;
        } else if (args.kind == "negative") {
            Constructed c = construct_negative(env, args.lambda, args.alpha);
            structure = std::move(c.structure);
            profile = std::move(c.profile);
            result.summary["s_lambda"] = s_lambda(env, args.lambda);
        } else if (args.kind == "discrete") {
            if (!args.has_target) throw input_error("construct discrete: --target required");
            DiscreteConstructed d = construct_discrete(env, target, args.epsilon, args.grid_step);
            structure = std::move(d.structure);
            profile = std::move(d.profile);
            trembles = d.trembles;
            sequential = true;
            result.summary["eta"] = d.eta;
            result.summary["delta"] = d.delta;
            result.summary["branch"] = d.branch;
        } else {
            throw input_error("unknown construct kind: " + args.kind);
        }

        const PayoffPoint achieved = payoffs(env, structure, profile);
        result.summary["payoffs"] = payoff_json(achieved);
        if (!args.out_structure.empty())
            write_json(result, args.out_structure, to_json(structure));
        if (!args.out_profile.empty()) write_json(result, args.out_profile, to_json(profile));

        if (args.verify) {
            VerificationReport report;
            if (sequential)
                report =
                    verify_sequential(env, structure, profile, trembles, {10, 100, 1e4}, 1e-6);
            else
                report = verify_wpbe(env, structure, profile);
            result.summary["verification"] = to_json(report);
            // Reported for information: only some construction classes
            // promise price-independent beliefs.
            const PriceIndependence pi = verify_price_independent(structure, profile);
            result.summary["price_independent"] = pi.ok;
            result.summary["price_independent_gap"] = pi.gap;
            if (!report.ok()) {
                result.status = 3;
                result.error = "constructed profile failed verification";
            }
        }
    });
}

CommandResult cmd_verify(const VerifyArgs& args) {
    return guarded([&](CommandResult& result) {
        const Environment env = load_environment_file(args.env_path);
        const InformationStructure structure =
            structure_from_json(load_json_file(args.structure_path));
        const StrategyProfile profile = profile_from_json(load_json_file(args.profile_path));
        if (structure.n_values() != env.size())
            throw input_error("verify: structure value support does not match the environment");
        validate_structure(env, structure, 1e-6);
        validate_profile(env, structure, profile, 1e-6);

        VerificationReport report;
        if (!args.sequential_n.empty()) {
            TrembleSchedule trembles;
            trembles.exponents = args.tremble_exponents;
            if (trembles.exponents.size() != structure.n_seller())
                throw input_error("verify: tremble exponents must match seller signals");
            report = verify_sequential(env, structure, profile, trembles, args.sequential_n,
                                       args.tol);
        } else {
            report = verify_wpbe(env, structure, profile, args.tol);
        }
        if (args.price_independent) {
            const PriceIndependence pi = verify_price_independent(structure, profile, args.tol);
            report.price_independent = pi.ok;
            report.price_independent_gap = pi.gap;
        }
        result.summary = to_json(report);
        if (!report.ok()) {
            result.status = 3;
            result.error = "verification failed";
        }
    });
}

CommandResult cmd_reduce(const ReduceArgs& args) {
    return guarded([&](CommandResult& result) {
        const nlohmann::json doc = load_json_file(args.joint_path);
        const Environment env = load_bidimensional(doc);
        result.summary = to_json(env);
        result.summary["surplus"] = surplus(env);
        if (!args.out_path.empty()) write_json(result, args.out_path, to_json(env));
    });
}

namespace {

int finish(const CommandResult& result) {
    std::cout << result.summary.dump(2) << "\n";
    if (result.status != 0) std::cerr << "error: " << result.error << "\n";
    return result.status;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Payoff regions, incentive-compatible distributions, and certified "
                 "equilibrium constructions for posted-price bilateral trade"};
    app.require_subcommand(1);

    RegionsArgs regions_args;
    auto* regions = app.add_subcommand("regions", "Compute payoff regions and seller floors");
    regions->add_option("env", regions_args.env_path, "environment document")->required();
    regions->add_option("--svg", regions_args.svg_out, "write an SVG figure");
    regions->add_option("--csv", regions_args.csv_out, "write region vertices as CSV");
    regions->add_option("--lambda-grid", regions_args.lambda_grid,
                        "lambda grid for the negative-surplus envelope")
        ->delimiter(',');

    IcdArgs icd_args;
    auto* icd = app.add_subcommand("icd", "Incentive-compatible distribution tools");
    icd->add_option("subcommand", icd_args.subcommand, "check | decompose | pstar | binary")
        ->required();
    icd->add_option("env", icd_args.env_path, "environment document")->required();
    icd->add_option("--weights", icd_args.weights, "belief weights for `check`")
        ->delimiter(',');
    icd->add_option("--out", icd_args.out_path, "output document");
    icd->add_option("--cdf-csv", icd_args.cdf_csv_out, "sampled CDF table for `pstar`");

    ConstructArgs construct_args;
    std::vector<double> target_pair;
    auto* construct = app.add_subcommand("construct", "Build a structure and profile");
    construct->add_option("kind", construct_args.kind,
                          "any | discrete | garble | us-unique | fb | negative")
        ->required();
    construct->add_option("env", construct_args.env_path, "environment document")->required();
    construct->add_option("--target", target_pair, "target payoffs pi_b,pi_s")
        ->delimiter(',')
        ->expected(1, 2);
    construct->add_option("--beta", construct_args.beta, "seller mixing weight for `fb`");
    construct->add_option("--lambda", construct_args.lambda, "welfare weight for `negative`");
    construct->add_option("--alpha", construct_args.alpha, "tie mass for `negative`");
    construct->add_option("--epsilon", construct_args.epsilon, "target slack for `discrete`");
    construct->add_option("--grid-step", construct_args.grid_step, "price grid step");
    construct->add_option("--base-structure", construct_args.base_structure_path,
                          "garble base structure");
    construct->add_option("--base-profile", construct_args.base_profile_path,
                          "garble base profile");
    construct->add_option("--out-structure", construct_args.out_structure, "structure output");
    construct->add_option("--out-profile", construct_args.out_profile, "profile output");
    construct->add_flag("--verify", construct_args.verify, "run the verifier suite");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Verify a structure/profile pair");
    verify->add_option("env", verify_args.env_path, "environment document")->required();
    verify->add_option("structure", verify_args.structure_path, "structure document")->required();
    verify->add_option("profile", verify_args.profile_path, "profile document")->required();
    verify->add_option("--sequential", verify_args.sequential_n, "tremble sizes n")
        ->delimiter(',');
    verify->add_option("--tremble-exponents", verify_args.tremble_exponents,
                       "per seller signal tremble exponents")
        ->delimiter(',');
    verify->add_flag("--price-independent", verify_args.price_independent,
                     "also check price-independent beliefs");
    verify->add_option("--tol", verify_args.tol, "verification tolerance");

    ReduceArgs reduce_args;
    auto* reduce = app.add_subcommand("reduce", "Collapse a (value, cost) joint distribution");
    reduce->add_option("joint", reduce_args.joint_path, "bidimensional document")->required();
    reduce->add_option("--out", reduce_args.out_path, "environment output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (regions->parsed()) return finish(cmd_regions(regions_args));
    if (icd->parsed()) return finish(cmd_icd(icd_args));
    if (construct->parsed()) {
        if (target_pair.size() == 2) {
            construct_args.target_pi_b = target_pair[0];
            construct_args.target_pi_s = target_pair[1];
            construct_args.has_target = true;
        }
        return finish(cmd_construct(construct_args));
    }
    if (verify->parsed()) return finish(cmd_verify(verify_args));
    if (reduce->parsed()) return finish(cmd_reduce(reduce_args));
    return 2;
}

}  // namespace infodesign::cli
