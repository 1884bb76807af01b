// Copyright 2026-present the lire project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lire/analysis.hpp"
#include "lire/eval.hpp"
#include "lire/index.hpp"
#include "lire/io.hpp"
#include "lire/log.hpp"
#include "lire/oracle.hpp"
#include "lire/search.hpp"
#include "lire/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "lire 0.1.0";

struct GlobalOpts {
    int threads = 0;  // 0 = auto
    std::string log_level = "info";
};

void apply_log_level(const std::string& level) {
    if (level == "error") {
        lire::set_log_level(lire::LogLevel::error);
    } else if (level == "warn") {
        lire::set_log_level(lire::LogLevel::warn);
    } else {
        lire::set_log_level(lire::LogLevel::info);
    }
}

// Every run logs its fully resolved configuration.
void log_config(const std::string& subcommand, const std::vector<std::pair<std::string,
                std::string>>& kv) {
    std::ostringstream out;
    out << "config: subcommand=" << subcommand;
    for (const auto& [key, value] : kv) out << ' ' << key << '=' << value;
    lire::log_info(out.str());
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct MetricSpec {
    std::string name;
    uint32_t k = 0;
};

MetricSpec parse_metric(const std::string& text) {
    const size_t at = text.find('@');
    lire::require(at != std::string::npos && at > 0 && at + 1 < text.size(),
                  lire::ErrorKind::invalid_argument,
                  "metric must look like mrr@10, success@5 or recall@50");
    MetricSpec spec;
    spec.name = text.substr(0, at);
    lire::require(spec.name == "mrr" || spec.name == "success" || spec.name == "recall",
                  lire::ErrorKind::invalid_argument, "unknown metric '" + spec.name + "'");
    try {
        spec.k = static_cast<uint32_t>(std::stoul(text.substr(at + 1)));
    } catch (const std::exception&) {
        lire::fail(lire::ErrorKind::invalid_argument, "bad metric depth in '" + text + "'");
    }
    lire::require(spec.k >= 1, lire::ErrorKind::invalid_argument, "metric depth must be >= 1");
    return spec;
}

std::vector<uint32_t> parse_u32_list(const std::string& text, const char* what) {
    std::vector<uint32_t> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(static_cast<uint32_t>(std::stoul(item)));
        } catch (const std::exception&) {
            lire::fail(lire::ErrorKind::invalid_argument,
                       std::string("bad ") + what + " list entry '" + item + "'");
        }
    }
    lire::require(!values.empty(), lire::ErrorKind::invalid_argument,
                  std::string("empty ") + what + " list");
    return values;
}

void require_file(const std::string& path) {
    lire::require(fs::exists(path), lire::ErrorKind::io_failure, "no such file: " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lire: storage-efficient late-interaction retrieval engine"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    GlobalOpts global;
    app.add_option("--threads", global.threads, "worker threads (0 = auto)")
        ->capture_default_str();
    app.add_option("--log-level", global.log_level, "error|warn|info")
        ->check(CLI::IsMember({"error", "warn", "info"}))
        ->capture_default_str();

    // ---- synth ----
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus + queries + qrels");
    lire::SynthParams sp;
    std::string synth_profile = "clustered";
    std::string synth_out_emb, synth_out_queries, synth_out_qrels, synth_out_tokens;
    synth_cmd->add_option("--profile", synth_profile, "clustered|random")
        ->check(CLI::IsMember({"clustered", "random"}))
        ->capture_default_str();
    synth_cmd->add_option("--n-passages", sp.n_passages)->capture_default_str();
    synth_cmd->add_option("--tokens-per-passage", sp.tokens_per_passage)->capture_default_str();
    synth_cmd->add_option("--dim", sp.dim)->capture_default_str();
    synth_cmd->add_option("--n-clusters", sp.n_clusters, "vocabulary size")
        ->capture_default_str();
    synth_cmd->add_option("--noise", sp.noise, "perturbation in [0, 1)")->capture_default_str();
    synth_cmd->add_option("--seed", sp.seed)->capture_default_str();
    synth_cmd->add_option("--n-queries", sp.n_queries)->capture_default_str();
    synth_cmd->add_option("--query-tokens", sp.query_tokens)->capture_default_str();
    synth_cmd->add_option("--out-embeddings", synth_out_emb)->required();
    synth_cmd->add_option("--out-queries", synth_out_queries)->required();
    synth_cmd->add_option("--out-qrels", synth_out_qrels)->required();
    synth_cmd->add_option("--out-tokens", synth_out_tokens, "token sidecar TSV");

    // ---- index ----
    auto* index_cmd = app.add_subcommand("index", "build a compressed index from embeddings");
    std::string index_embeddings, index_out;
    lire::BuildParams bp;
    index_cmd->add_option("--embeddings", index_embeddings)->required();
    index_cmd->add_option("--out", index_out, "index directory")->required();
    index_cmd->add_option("--bits", bp.bits, "residual bits per dimension (1 or 2)")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    index_cmd->add_option("--seed", bp.seed)->capture_default_str();
    index_cmd->add_option("--chunk-size", bp.chunk_size, "passages per encoding chunk")
        ->capture_default_str();
    index_cmd->add_option("--sample-mult", bp.sample_mult,
                          "multiplier on the sqrt(n_passages) training sample")
        ->capture_default_str();
    bool index_stats_only = false;
    index_cmd->add_flag("--stats-only", index_stats_only,
                        "load an existing index from --out and print stats");

    // ---- search ----
    auto* search_cmd = app.add_subcommand("search", "two-stage retrieval over an index");
    std::string search_index, search_queries, search_out;
    uint32_t search_nprobe = 2, search_ncandidates = 0, search_k = 10;
    search_cmd->add_option("--index", search_index)->required();
    search_cmd->add_option("--queries", search_queries)->required();
    search_cmd->add_option("--nprobe", search_nprobe)->capture_default_str();
    search_cmd->add_option("--ncandidates", search_ncandidates,
                           "passages rescored exactly (0 = nprobe * 4096)")
        ->capture_default_str();
    search_cmd->add_option("--k", search_k)->capture_default_str();
    search_cmd->add_option("--out", search_out, "results TSV")->required();

    // ---- oracle ----
    auto* oracle_cmd = app.add_subcommand("oracle", "exact brute-force scoring");
    std::string oracle_embeddings, oracle_index, oracle_queries, oracle_out;
    uint32_t oracle_k = 10;
    bool oracle_clamped = false;
    oracle_cmd->add_option("--embeddings", oracle_embeddings, "uncompressed corpus");
    oracle_cmd->add_option("--index", oracle_index, "decoded-corpus variant");
    oracle_cmd->add_option("--queries", oracle_queries)->required();
    oracle_cmd->add_option("--k", oracle_k)->capture_default_str();
    oracle_cmd->add_option("--out", oracle_out, "results TSV")->required();
    oracle_cmd->add_flag("--clamped", oracle_clamped,
                         "clamp per-row maxima at 0 (decoded variant only)");

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "IR metrics over results + qrels");
    std::string eval_results, eval_qrels, eval_metric = "mrr@10";
    bool eval_per_query = false;
    eval_cmd->add_option("--results", eval_results)->required();
    eval_cmd->add_option("--qrels", eval_qrels)->required();
    eval_cmd->add_option("--metric", eval_metric, "mrr@K | success@K | recall@K")
        ->capture_default_str();
    eval_cmd->add_flag("--per-query", eval_per_query, "also print per-query values");

    // ---- bench ----
    auto* bench_cmd = app.add_subcommand("bench", "latency sweep over search parameters");
    std::string bench_index, bench_queries, bench_qrels, bench_out;
    std::string bench_probes = "1,2,4", bench_cand_mults = "4096,16384";
    uint32_t bench_reps = 3, bench_k = 10;
    bool bench_parallel = false;
    bench_cmd->add_option("--index", bench_index)->required();
    bench_cmd->add_option("--queries", bench_queries)->required();
    bench_cmd->add_option("--qrels", bench_qrels, "optional qrels for quality columns");
    bench_cmd->add_option("--probes", bench_probes, "comma-separated nprobe values")
        ->capture_default_str();
    bench_cmd->add_option("--cand-mults", bench_cand_mults,
                          "candidates = nprobe * mult, comma-separated")
        ->capture_default_str();
    bench_cmd->add_option("--reps", bench_reps)->capture_default_str();
    bench_cmd->add_option("--k", bench_k)->capture_default_str();
    bench_cmd->add_option("--out", bench_out, "bench TSV")->required();
    bench_cmd->add_flag("--parallel", bench_parallel,
                        "also report multithreaded throughput separately");

    // ---- analyze ----
    auto* analyze_cmd =
        app.add_subcommand("analyze", "cluster token-composition statistics and eCDFs");
    std::string analyze_index, analyze_tokens, analyze_vocab, analyze_out;
    uint64_t analyze_seed = 0;
    bool analyze_no_baseline = false;
    size_t analyze_top_tokens = 5;
    analyze_cmd->add_option("--index", analyze_index)->required();
    analyze_cmd->add_option("--tokens", analyze_tokens, "embedding_offset<TAB>token_id TSV")
        ->required();
    analyze_cmd->add_option("--vocab", analyze_vocab, "token_id<TAB>string TSV");
    analyze_cmd->add_option("--out", analyze_out, "output directory")->required();
    analyze_cmd->add_option("--seed", analyze_seed, "random-baseline seed")
        ->capture_default_str();
    analyze_cmd->add_flag("--no-baseline", analyze_no_baseline,
                          "skip the random-embedding baseline");
    analyze_cmd->add_option("--top-tokens", analyze_top_tokens,
                            "tokens per cluster in the exemplar report")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    apply_log_level(global.log_level);
    const std::string threads_str = std::to_string(global.threads);

    try {
        if (synth_cmd->parsed()) {
            sp.profile = synth_profile == "random" ? lire::SynthProfile::random
                                                   : lire::SynthProfile::clustered;
            log_config("synth", {{"profile", synth_profile},
                                 {"n_passages", std::to_string(sp.n_passages)},
                                 {"tokens_per_passage", std::to_string(sp.tokens_per_passage)},
                                 {"dim", std::to_string(sp.dim)},
                                 {"n_clusters", std::to_string(sp.n_clusters)},
                                 {"noise", fmt_double(sp.noise)},
                                 {"seed", std::to_string(sp.seed)},
                                 {"n_queries", std::to_string(sp.n_queries)},
                                 {"query_tokens", std::to_string(sp.query_tokens)},
                                 {"out_embeddings", synth_out_emb},
                                 {"out_queries", synth_out_queries},
                                 {"out_qrels", synth_out_qrels},
                                 {"out_tokens", synth_out_tokens}});
            lire::synth_to_files(sp, synth_out_emb, synth_out_queries, synth_out_qrels,
                                 synth_out_tokens);
            lire::log_info("wrote " + synth_out_emb + ", " + synth_out_queries + ", " +
                           synth_out_qrels);
        } else if (index_cmd->parsed()) {
            bp.threads = global.threads;
            log_config("index", {{"embeddings", index_embeddings},
                                 {"out", index_out},
                                 {"bits", std::to_string(bp.bits)},
                                 {"seed", std::to_string(bp.seed)},
                                 {"chunk_size", std::to_string(bp.chunk_size)},
                                 {"sample_mult", fmt_double(bp.sample_mult)},
                                 {"stats_only", index_stats_only ? "true" : "false"},
                                 {"threads", threads_str}});
            if (index_stats_only) {
                const auto [index, ivf] = lire::load_index(index_out);
                std::cout << lire::index_stats(index, ivf).to_string() << '\n';
            } else {
                require_file(index_embeddings);
                const lire::EmbeddingSet embeddings = lire::read_embeddings(index_embeddings);
                const auto [index, ivf] = lire::build_index(embeddings, bp);
                lire::save_index(index, ivf, index_out);
                std::cout << lire::index_stats(index, ivf).to_string() << '\n';
                lire::log_info("wrote index to " + index_out);
            }
        } else if (search_cmd->parsed()) {
            lire::SearchParams params;
            params.nprobe = search_nprobe;
            params.ncandidates =
                search_ncandidates == 0 ? search_nprobe * 4096 : search_ncandidates;
            params.k = search_k;
            log_config("search", {{"index", search_index},
                                  {"queries", search_queries},
                                  {"nprobe", std::to_string(params.nprobe)},
                                  {"ncandidates", std::to_string(params.ncandidates)},
                                  {"k", std::to_string(params.k)},
                                  {"out", search_out},
                                  {"threads", threads_str}});
            require_file(search_queries);
            const auto [index, ivf] = lire::load_index(search_index);
            const lire::EmbeddingSet queries = lire::read_embeddings(search_queries);
            const lire::Searcher searcher(index, ivf);
            const lire::RankedResults results =
                searcher.search_batch(queries, params, global.threads);
            lire::write_results(results, search_out);
            lire::log_info("wrote " + std::to_string(results.size()) + " result lists to " +
                           search_out);
        } else if (oracle_cmd->parsed()) {
            const bool has_emb = !oracle_embeddings.empty();
            const bool has_index = !oracle_index.empty();
            lire::require(has_emb != has_index, lire::ErrorKind::invalid_argument,
                          "pass exactly one of --embeddings or --index");
            lire::require(!oracle_clamped || has_index, lire::ErrorKind::invalid_argument,
                          "--clamped applies to the --index variant only");
            log_config("oracle", {{"embeddings", oracle_embeddings},
                                  {"index", oracle_index},
                                  {"queries", oracle_queries},
                                  {"k", std::to_string(oracle_k)},
                                  {"clamped", oracle_clamped ? "true" : "false"},
                                  {"out", oracle_out}});
            require_file(oracle_queries);
            const lire::EmbeddingSet queries = lire::read_embeddings(oracle_queries);
            lire::RankedResults results;
            if (has_emb) {
                require_file(oracle_embeddings);
                const lire::EmbeddingSet corpus = lire::read_embeddings(oracle_embeddings);
                results = lire::brute_force_search(queries, corpus, oracle_k);
            } else {
                const auto [index, ivf] = lire::load_index(oracle_index);
                results = lire::brute_force_decoded(queries, index, oracle_k, oracle_clamped);
            }
            lire::write_results(results, oracle_out);
            lire::log_info("wrote " + std::to_string(results.size()) + " result lists to " +
                           oracle_out);
        } else if (eval_cmd->parsed()) {
            log_config("eval", {{"results", eval_results},
                                {"qrels", eval_qrels},
                                {"metric", eval_metric}});
            require_file(eval_results);
            require_file(eval_qrels);
            const MetricSpec spec = parse_metric(eval_metric);
            const lire::RankedResults results = lire::read_results(eval_results);
            const lire::Qrels qrels = lire::read_qrels(eval_qrels);
            lire::MetricReport report;
            if (spec.name == "mrr") {
                report = lire::mrr_at_k(results, qrels, spec.k);
            } else if (spec.name == "success") {
                report = lire::success_at_k(results, qrels, spec.k);
            } else {
                report = lire::recall_at_k(results, qrels, spec.k);
            }
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", report.mean);
            std::cout << report.name << '\t' << buf << "\tqueries=" << report.n_evaluated
                      << "\tskipped=" << report.n_skipped << '\n';
            if (eval_per_query) {
                for (const auto& [qid, value] : report.per_query) {
                    std::snprintf(buf, sizeof(buf), "%.6f", value);
                    std::cout << qid << '\t' << buf << '\n';
                }
            }
        } else if (bench_cmd->parsed()) {
            log_config("bench", {{"index", bench_index},
                                 {"queries", bench_queries},
                                 {"qrels", bench_qrels},
                                 {"probes", bench_probes},
                                 {"cand_mults", bench_cand_mults},
                                 {"reps", std::to_string(bench_reps)},
                                 {"k", std::to_string(bench_k)},
                                 {"parallel", bench_parallel ? "true" : "false"},
                                 {"out", bench_out},
                                 {"threads", threads_str}});
            require_file(bench_queries);
            const auto [index, ivf] = lire::load_index(bench_index);
            const lire::EmbeddingSet queries = lire::read_embeddings(bench_queries);
            lire::Qrels qrels;
            bool has_qrels = false;
            if (!bench_qrels.empty()) {
                require_file(bench_qrels);
                qrels = lire::read_qrels(bench_qrels);
                has_qrels = true;
            }
            std::vector<lire::SearchParams> sweep;
            for (const uint32_t probe : parse_u32_list(bench_probes, "probes")) {
                for (const uint32_t mult : parse_u32_list(bench_cand_mults, "cand-mults")) {
                    lire::SearchParams params;
                    params.nprobe = probe;
                    params.ncandidates = probe * mult;
                    params.k = bench_k;
                    sweep.push_back(params);
                }
            }
            const std::vector<lire::BenchRow> rows = lire::bench_latency(
                index, ivf, queries, has_qrels ? &qrels : nullptr, sweep, bench_reps);
            lire::write_bench_tsv(rows, bench_out);
            for (const lire::BenchRow& row : rows) {
                char buf[192];
                std::snprintf(buf, sizeof(buf),
                              "nprobe=%u ncandidates=%u mean=%.3fms min=%.3fms max=%.3fms",
                              row.params.nprobe, row.params.ncandidates, row.mean_ms,
                              row.min_ms, row.max_ms);
                std::cout << buf << '\n';
            }
            if (bench_parallel) {
                const double qps = lire::bench_throughput(index, ivf, queries, sweep.front(),
                                                          global.threads);
                char buf[96];
                std::snprintf(buf, sizeof(buf), "parallel throughput: %.1f queries/s", qps);
                std::cout << buf << '\n';
            }
            lire::log_info("wrote " + std::to_string(rows.size()) + " sweep rows to " +
                           bench_out);
        } else if (analyze_cmd->parsed()) {
            log_config("analyze", {{"index", analyze_index},
                                   {"tokens", analyze_tokens},
                                   {"vocab", analyze_vocab},
                                   {"out", analyze_out},
                                   {"seed", std::to_string(analyze_seed)},
                                   {"baseline", analyze_no_baseline ? "false" : "true"},
                                   {"threads", threads_str}});
            require_file(analyze_tokens);
            const auto [index, ivf] = lire::load_index(analyze_index);
            lire::TokenAnnotation annot =
                lire::read_token_annotations(analyze_tokens, index.n_embeddings);
            if (!analyze_vocab.empty()) {
                require_file(analyze_vocab);
                lire::read_vocab(analyze_vocab, annot);
            }

            std::error_code ec;
            fs::create_directories(analyze_out, ec);
            lire::require(!ec, lire::ErrorKind::io_failure,
                          "cannot create directory: " + analyze_out);

            const lire::ClusterTokenStats stats =
                lire::cluster_token_stats(index.codes, annot, index.codec.n_centroids);
            lire::write_ecdf_tsv(lire::ecdf(stats.tokens_per_cluster),
                                 (fs::path(analyze_out) / "ecdf_tokens_per_cluster.tsv").string());
            std::vector<uint32_t> cpt;
            cpt.reserve(stats.clusters_per_token.size());
            for (const auto& [token, count] : stats.clusters_per_token) cpt.push_back(count);
            lire::write_ecdf_tsv(lire::ecdf(cpt),
                                 (fs::path(analyze_out) / "ecdf_clusters_per_token.tsv").string());

            if (!analyze_no_baseline) {
                const lire::ClusterTokenStats baseline = lire::random_baseline(
                    annot, index.codec.dim, index.codec.n_centroids, analyze_seed,
                    global.threads);
                lire::write_ecdf_tsv(
                    lire::ecdf(baseline.tokens_per_cluster),
                    (fs::path(analyze_out) / "ecdf_tokens_per_cluster_random.tsv").string());
                std::vector<uint32_t> cpt_rand;
                cpt_rand.reserve(baseline.clusters_per_token.size());
                for (const auto& [token, count] : baseline.clusters_per_token) {
                    cpt_rand.push_back(count);
                }
                lire::write_ecdf_tsv(
                    lire::ecdf(cpt_rand),
                    (fs::path(analyze_out) / "ecdf_clusters_per_token_random.tsv").string());
            }

            const auto exemplars = lire::cluster_exemplars(index.codes, annot,
                                                           index.codec.n_centroids,
                                                           analyze_top_tokens);
            std::ofstream out(fs::path(analyze_out) / "cluster_exemplars.tsv", std::ios::trunc);
            lire::require(out.good(), lire::ErrorKind::io_failure,
                          "cannot write cluster_exemplars.tsv");
            out << "cluster\tn_embeddings\ttop_tokens\n";
            for (const auto& ex : exemplars) {
                out << ex.cluster << '\t' << ex.n_embeddings << '\t';
                for (size_t i = 0; i < ex.top_tokens.size(); ++i) {
                    if (i > 0) out << ',';
                    const auto vocab_it = annot.vocab.find(ex.top_tokens[i].first);
                    if (vocab_it != annot.vocab.end()) {
                        out << vocab_it->second;
                    } else {
                        out << ex.top_tokens[i].first;
                    }
                    out << ':' << ex.top_tokens[i].second;
                }
                out << '\n';
            }
            out.flush();
            lire::require(out.good(), lire::ErrorKind::io_failure,
                          "write failed: cluster_exemplars.tsv");
            lire::log_info("wrote analysis to " + analyze_out);
        }
    } catch (const lire::Error& e) {
        lire::log_error(e.what());
        return e.kind() == lire::ErrorKind::io_failure ? 2 : 1;
    } catch (const std::exception& e) {
        lire::log_error(e.what());
        return 1;
    }
    return 0;
}
