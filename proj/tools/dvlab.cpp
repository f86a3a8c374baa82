// dvlab command-line front end. Exit codes: 0 ok, 1 I/O, 2 validation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dvlab/config.hpp"
#include "dvlab/corpus_io.hpp"
#include "dvlab/embedding_io.hpp"
#include "dvlab/errors.hpp"
#include "dvlab/harness.hpp"

namespace fs = std::filesystem;
using namespace dvlab;

namespace {

using Flags = std::vector<std::pair<std::string, std::string>>;

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + path);
}

std::string flag_comments(const std::string& command, const Flags& flags) {
    std::string out = "# dvlab " + command + " version=" + kToolVersion + "\n";
    for (const auto& [k, v] : flags) out += "# " + k + "=" + v + "\n";
    return out;
}

// Binary and JSONL outputs cannot carry comments, so flags go to a sidecar.
void write_sidecar(const std::string& out_path, const std::string& command, const Flags& flags) {
    nlohmann::ordered_json meta;
    meta["command"] = command;
    meta["version"] = kToolVersion;
    for (const auto& [k, v] : flags) meta["flags"][k] = v;
    write_text(out_path + ".meta.json", meta.dump(2) + "\n");
}

PolarAngle angle_from(const std::optional<double>& cossim, const std::optional<double>& theta) {
    if (cossim.has_value() == theta.has_value()) throw DomainError("give exactly one of --cossim and --theta");
    if (cossim) {
        if (!(*cossim >= -1.0 && *cossim <= 1.0)) throw DomainError("--cossim must lie in [-1, 1]");
        return PolarAngle::from_cosine(*cossim);
    }
    return PolarAngle(*theta);
}

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    for (auto v : parse_size_list(text)) dims.push_back(static_cast<std::size_t>(v));
    return dims;
}

// --------------------------------------------------------------------------

struct TheoryArgs {
    std::string dims, sizes, out = "-";
    std::optional<double> cossim, theta;
};

void cmd_theory(const TheoryArgs& a) {
    const auto angle = angle_from(a.cossim, a.theta);
    const auto dims = parse_dims(a.dims);
    const auto sizes = parse_size_list(a.sizes);
    const auto rows = theory_curve(dims, angle, sizes);
    Flags flags{{"dims", a.dims}, {"sizes", a.sizes}};
    if (a.cossim) flags.emplace_back("cossim", format_double(*a.cossim));
    if (a.theta) flags.emplace_back("theta", format_double(*a.theta));
    std::string csv = flag_comments("theory", flags) + "k,theta,n,p_single,p_compound\n";
    for (const auto& r : rows) {
        csv += std::to_string(r.k) + "," + format_double(r.theta) + "," + std::to_string(r.n) + "," +
               format_double(r.p_single.value()) + "," + format_double(r.p_compound.value()) + "\n";
    }
    write_text(a.out, csv);
}

struct MonteCarloArgs {
    std::size_t dim = 0;
    std::optional<double> cossim, theta;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 42;
    unsigned threads = default_threads();
};

void cmd_montecarlo(const MonteCarloArgs& a) {
    const auto angle = angle_from(a.cossim, a.theta);
    const Dimension k(a.dim);
    const auto est = mc_cap_fraction(angle, k, a.trials, a.seed, a.threads);
    const double analytic = cap_fraction(angle, k).value();
    const double sigma = std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(a.trials));
    std::cout << "dim=" << a.dim << "\n"
              << "theta=" << format_double(angle.radians()) << "\n"
              << "trials=" << a.trials << "\n"
              << "seed=" << a.seed << "\n"
              << "hits=" << est.hits << "\n"
              << "estimate=" << format_double(est.estimate) << "\n"
              << "stderr=" << format_double(est.stderr_) << "\n"
              << "analytic=" << format_double(analytic) << "\n";
    if (sigma > 0.0) {
        std::cout << "z=" << format_double((est.estimate - analytic) / sigma) << "\n";
    } else {
        std::cout << "z=" << (est.estimate == analytic ? "0" : "inf") << "\n";
    }
}

// --------------------------------------------------------------------------

struct ExperimentArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    unsigned threads = default_threads();
    bool resume = false;
};

ConfigFile load_config(const ExperimentArgs& a) {
    ConfigFile config;
    if (!a.config.empty()) config = read_config(a.config);
    for (const auto& s : a.sets) apply_override(config, s);
    return config;
}

void finish_report(ExperimentReport& report, const ConfigFile& config, const std::string& out) {
    for (const auto& [k, v] : config.entries) report.set_metadata("config." + k, v);
    write_text(out + ".json", to_json(report));
    write_text(out + ".csv", to_csv(report));
}

RunOptions progress_options(const ExperimentArgs& a, std::ofstream& log) {
    RunOptions options;
    options.threads = a.threads;
    const std::string log_path = a.out + ".cells.jsonl";
    if (a.resume && fs::exists(log_path)) {
        std::ifstream in(log_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                options.completed.push_back(cell_from_json_line(line));
            } catch (const std::exception&) {
                break;  // a torn last line from an interrupted run
            }
        }
    }
    log.open(log_path, std::ios::binary | std::ios::trunc);
    if (!log) throw IoError("cannot write " + log_path);
    for (const auto& c : options.completed) log << cell_to_json_line(c) << "\n";
    log.flush();
    options.on_cell = [&log](const ReportCell& cell) {
        log << cell_to_json_line(cell) << "\n";
        log.flush();
    };
    return options;
}

void cmd_growth(const ExperimentArgs& a) {
    const auto config = load_config(a);
    const auto spec = growth_spec_from_config(config);
    std::ofstream log;
    auto report = run_growth(spec, progress_options(a, log));
    const Bm25System* sparse = nullptr;
    for (const auto& s : spec.systems) {
        if ((sparse = std::get_if<Bm25System>(&s))) break;
    }
    if (sparse && spec.sizes.size() >= 2) {
        for (const auto& s : spec.systems) {
            if (!std::holds_alternative<DenseSystem>(s)) continue;
            const auto tip = find_tipping_point(report, system_name(s), sparse->name, metric_names::mrr(spec.cutoff));
            const std::string value = tip ? std::to_string(*tip) : "none";
            report.set_metadata("tipping." + system_name(s), value);
            std::cout << "tipping point " << system_name(s) << " vs " << sparse->name << ": " << value << "\n";
        }
    }
    finish_report(report, config, a.out);
}

void cmd_noise(const ExperimentArgs& a) {
    const auto config = load_config(a);
    const auto spec = noise_spec_from_config(config);
    std::ofstream log;
    auto report = run_noise(spec, progress_options(a, log));
    finish_report(report, config, a.out);
}

// --------------------------------------------------------------------------

struct EmbedArgs {
    std::string in, out;
    std::size_t dim = 0;
    std::uint64_t seed = 42;
    bool queries = false;
};

void cmd_embed_convert(const std::string& name, const EmbedArgs& a) {
    write_embeddings(read_embeddings(a.in), a.out);
    write_sidecar(a.out, "embed " + name, {{"in", a.in}, {"out", a.out}});
}

void cmd_embed_project(const EmbedArgs& a) {
    const auto m = read_embeddings(a.in);
    write_embeddings(project(m, Dimension(a.dim), a.seed), a.out);
    write_sidecar(a.out, "embed project",
                  {{"in", a.in}, {"out", a.out}, {"dim", std::to_string(a.dim)}, {"seed", std::to_string(a.seed)}});
}

void cmd_embed_lift(const EmbedArgs& a) {
    const auto m = read_embeddings(a.in);
    if (a.queries) {
        EmbeddingMatrix lifted(Dimension(m.dim() + 1));
        for (std::size_t i = 0; i < m.size(); ++i) {
            const auto row = m.row(i);
            const auto q = lift_query({m.id(i), std::vector<double>(row.begin(), row.end())});
            lifted.append(q.id, q.values);
        }
        write_embeddings(lifted, a.out);
    } else {
        write_embeddings(lift_to_unit_sphere(m), a.out);
    }
    write_sidecar(a.out, "embed lift", {{"in", a.in}, {"out", a.out}, {"queries", a.queries ? "true" : "false"}});
}

// --------------------------------------------------------------------------

struct GenArgs {
    std::string out, out_queries, out_relevant, out_qrels;
    std::size_t count = 1000;
    std::size_t dim = 0;
    std::uint64_t seed = 42;
    std::size_t min_len = 20, max_len = 150;
    double half_angle = 0.0;
    double cossim = 0.8;
};

void cmd_gen_noise(const GenArgs& a) {
    if (a.min_len > a.max_len) throw DomainError("--min-len exceeds --max-len");
    NoiseSpec spec{a.count, a.seed, a.min_len, a.max_len};
    std::ostringstream text;
    write_documents_jsonl(gen_noise_strings(spec), text);
    write_text(a.out, text.str());
    write_sidecar(a.out, "gen noise",
                  {{"count", std::to_string(a.count)}, {"seed", std::to_string(a.seed)},
                   {"min_len", std::to_string(a.min_len)}, {"max_len", std::to_string(a.max_len)}});
}

void cmd_gen_sphere(const GenArgs& a) {
    write_embeddings(sample_uniform_sphere(Dimension(a.dim), a.count, a.seed), a.out);
    write_sidecar(a.out, "gen sphere",
                  {{"dim", std::to_string(a.dim)}, {"count", std::to_string(a.count)}, {"seed", std::to_string(a.seed)}});
}

void cmd_gen_cone(const GenArgs& a) {
    const Dimension k(a.dim);
    ConeSpec spec;
    spec.k = k;
    spec.mean_direction.assign(k, 0.0);
    spec.mean_direction[0] = 1.0;
    spec.half_angle = a.half_angle;
    spec.count = a.count;
    spec.seed = a.seed;
    write_embeddings(gen_cone_vectors(spec), a.out);
    write_sidecar(a.out, "gen cone",
                  {{"dim", std::to_string(a.dim)}, {"count", std::to_string(a.count)},
                   {"half_angle", format_double(a.half_angle)}, {"seed", std::to_string(a.seed)}});
}

void cmd_gen_planted(const GenArgs& a) {
    PlantedPairSpec spec;
    spec.k = a.dim;
    spec.target_cossim = a.cossim;
    spec.num_queries = a.count;
    spec.seed = a.seed;
    const auto pairs = gen_planted_pairs(spec);
    const Flags flags{{"dim", std::to_string(a.dim)}, {"cossim", format_double(a.cossim)},
                      {"count", std::to_string(a.count)}, {"seed", std::to_string(a.seed)}};
    write_embeddings(pairs.queries, a.out_queries);
    write_sidecar(a.out_queries, "gen planted", flags);
    write_embeddings(pairs.relevants, a.out_relevant);
    write_sidecar(a.out_relevant, "gen planted", flags);
    if (!a.out_qrels.empty()) {
        Qrels qrels;
        for (std::size_t i = 0; i < pairs.queries.size(); ++i) qrels.add(pairs.queries.id(i), pairs.relevants.id(i));
        std::ostringstream text;
        text << flag_comments("gen planted", flags);
        write_qrels_tsv(qrels, text);
        write_text(a.out_qrels, text.str());
    }
}

// --------------------------------------------------------------------------

struct EmpiricsArgs {
    std::size_t dim = 128;
    double cossim = 0.8;
    std::size_t queries = 2000;
    std::string sizes = "1e3..1e5";
    std::string distractors = "uniform";
    std::optional<double> half_angle;
    std::uint64_t seed = 42;
    unsigned threads = default_threads();
    std::string out = "-";
};

void cmd_empirics(const EmpiricsArgs& a) {
    PlantedPairSpec planted;
    planted.k = a.dim;
    planted.target_cossim = a.cossim;
    planted.num_queries = a.queries;
    planted.seed = a.seed;
    planted.validate();
    DistractorModel model{parse_distractor_kind(a.distractors),
                          a.half_angle.value_or(std::acos(a.cossim) / 2.0)};
    const auto sizes = parse_size_list(a.sizes);
    const auto rows = empirics_vs_theory(planted, model, sizes, a.threads);
    Flags flags{{"dim", std::to_string(a.dim)},  {"cossim", format_double(a.cossim)},
                {"queries", std::to_string(a.queries)}, {"sizes", a.sizes},
                {"distractors", a.distractors}, {"seed", std::to_string(a.seed)}};
    if (model.kind == DistractorKind::cone) flags.emplace_back("half_angle", format_double(model.half_angle));
    std::string csv = flag_comments("empirics", flags) + "n,queries,defeats,measured,analytic,sigma,ratio\n";
    for (const auto& r : rows) {
        csv += std::to_string(r.n) + "," + std::to_string(r.queries) + "," + std::to_string(r.defeats) + "," +
               format_double(r.measured) + "," + format_double(r.analytic.value()) + "," + format_double(r.sigma) +
               "," + (r.ratio ? format_double(*r.ratio) : std::string("nan")) + "\n";
    }
    write_text(a.out, csv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dense vs sparse retrieval false-positive laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    std::function<void()> action;

    TheoryArgs theory;
    auto* th = app.add_subcommand("theory", "Analytic false-positive probabilities over (k, n)");
    th->add_option("--dims", theory.dims, "Dimensions, e.g. 2,3,128,768")->required();
    th->add_option("--cossim", theory.cossim, "Cosine similarity of the relevant document");
    th->add_option("--theta", theory.theta, "Polar angle in radians");
    th->add_option("--sizes", theory.sizes, "Index sizes, e.g. 1e2..1e8 or 10,100")->required();
    th->add_option("--out", theory.out, "Output CSV ('-' for stdout)");
    th->callback([&] { action = [&] { cmd_theory(theory); }; });

    MonteCarloArgs mc;
    auto* mcc = app.add_subcommand("montecarlo", "Monte Carlo estimate of a cap fraction");
    mcc->add_option("--dim", mc.dim, "Dimension k")->required();
    mcc->add_option("--theta", mc.theta, "Polar angle in radians");
    mcc->add_option("--cossim", mc.cossim, "Cosine of the polar angle");
    mcc->add_option("--trials", mc.trials, "Number of samples");
    mcc->add_option("--seed", mc.seed, "Random seed");
    mcc->add_option("--threads", mc.threads, "Worker threads (results do not depend on it)");
    mcc->callback([&] { action = [&] { cmd_montecarlo(mc); }; });

    ExperimentArgs growth, noise;
    for (auto [name, args, help] : {std::tuple{"growth", &growth, "Index growth experiment"},
                                    std::tuple{"noise", &noise, "Random-string noise experiment"}}) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", args->config, "Config file");
        sub->add_option("--set", args->sets, "Override a config key (key=value)")->take_all();
        sub->add_option("--out", args->out, "Output prefix for .json/.csv/.cells.jsonl")->required();
        sub->add_option("--threads", args->threads, "Worker threads (results do not depend on it)");
        sub->add_flag("--resume", args->resume, "Reuse cells from <out>.cells.jsonl");
        const std::string n = name;
        sub->callback([&, n] {
            action = n == "growth" ? std::function<void()>([&] { cmd_growth(growth); })
                                   : std::function<void()>([&] { cmd_noise(noise); });
        });
    }

    EmbedArgs embed;
    auto* emb = app.add_subcommand("embed", "Embedding file conversion and transforms");
    emb->require_subcommand(1);
    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--in", embed.in, "Input embeddings (.dvec or .jsonl)")->required();
        sub->add_option("--out", embed.out, "Output file")->required();
    };
    auto* imp = emb->add_subcommand("import", "JSONL to DVEC (format follows the file extensions)");
    add_io(imp);
    imp->callback([&] { action = [&] { cmd_embed_convert("import", embed); }; });
    auto* exp = emb->add_subcommand("export", "DVEC to JSONL (format follows the file extensions)");
    add_io(exp);
    exp->callback([&] { action = [&] { cmd_embed_convert("export", embed); }; });
    auto* proj = emb->add_subcommand("project", "Seeded orthonormal down-projection");
    add_io(proj);
    proj->add_option("--dim", embed.dim, "Target dimension")->required();
    proj->add_option("--seed", embed.seed, "Random seed");
    proj->callback([&] { action = [&] { cmd_embed_project(embed); }; });
    auto* lift = emb->add_subcommand("lift", "Lift for dot-product to cosine reduction");
    add_io(lift);
    lift->add_flag("--queries", embed.queries, "Lift as queries: (q, 0) / |q|");
    lift->callback([&] { action = [&] { cmd_embed_lift(embed); }; });

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Synthetic data generators");
    g->require_subcommand(1);
    auto* gn = g->add_subcommand("noise", "Random a-z strings as corpus JSONL");
    gn->add_option("--count", gen.count, "Number of items");
    gn->add_option("--seed", gen.seed, "Random seed");
    gn->add_option("--min-len", gen.min_len, "Shortest string, inclusive");
    gn->add_option("--max-len", gen.max_len, "Longest string, inclusive");
    gn->add_option("--out", gen.out, "Output file")->required();
    gn->callback([&] { action = [&] { cmd_gen_noise(gen); }; });
    auto* gs = g->add_subcommand("sphere", "Uniform unit vectors");
    gs->add_option("--dim", gen.dim, "Dimension k")->required();
    gs->add_option("--count", gen.count, "Number of items");
    gs->add_option("--seed", gen.seed, "Random seed");
    gs->add_option("--out", gen.out, "Output file")->required();
    gs->callback([&] { action = [&] { cmd_gen_sphere(gen); }; });
    auto* gc = g->add_subcommand("cone", "Uniform unit vectors on a cap around e1");
    gc->add_option("--dim", gen.dim, "Dimension k")->required();
    gc->add_option("--half-angle", gen.half_angle, "Cone half-angle in radians")->required();
    gc->add_option("--count", gen.count, "Number of items");
    gc->add_option("--seed", gen.seed, "Random seed");
    gc->add_option("--out", gen.out, "Output file")->required();
    gc->callback([&] { action = [&] { cmd_gen_cone(gen); }; });
    auto* gp = g->add_subcommand("planted", "Query/relevant pairs at a fixed cosine");
    gp->add_option("--dim", gen.dim, "Dimension k")->required();
    gp->add_option("--cossim", gen.cossim, "Cosine similarity");
    gp->add_option("--count", gen.count, "Number of items");
    gp->add_option("--seed", gen.seed, "Random seed");
    gp->add_option("--out-queries", gen.out_queries, "Query embeddings output")->required();
    gp->add_option("--out-relevant", gen.out_relevant, "Relevant embeddings output")->required();
    gp->add_option("--out-qrels", gen.out_qrels, "Qrels TSV output");
    gp->callback([&] { action = [&] { cmd_gen_planted(gen); }; });

    EmpiricsArgs emp;
    auto* em = app.add_subcommand("empirics", "Measured vs analytic defeat rates for planted pairs");
    em->add_option("--dim", emp.dim, "Dimension k");
    em->add_option("--cossim", emp.cossim, "Cosine similarity");
    em->add_option("--queries", emp.queries, "Number of planted queries");
    em->add_option("--sizes", emp.sizes, "Index sizes, e.g. 1e3..1e5");
    em->add_option("--distractors", emp.distractors, "uniform or cone");
    em->add_option("--half-angle", emp.half_angle, "Cone half-angle (default: half the planted angle)");
    em->add_option("--seed", emp.seed, "Random seed");
    em->add_option("--threads", emp.threads, "Worker threads (results do not depend on it)");
    em->add_option("--out", emp.out, "Output CSV (stdout by default)");
    em->callback([&] { action = [&] { cmd_empirics(emp); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (action) action();
        return 0;
    } catch (const DomainError& e) {
        std::cerr << "dvlab: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "dvlab: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "dvlab: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "dvlab: " << e.what() << "\n";
        return 1;
    }
}
