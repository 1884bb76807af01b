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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "lire/analysis.hpp"
#include "lire/eval.hpp"
#include "lire/index.hpp"
#include "lire/io.hpp"
#include "lire/oracle.hpp"
#include "lire/search.hpp"
#include "lire/synth.hpp"

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// A loaded (or freshly built) index together with its inverted lists; the
// searcher is built lazily on first use.
struct PyIndex {
    lire::CompressedIndex index;
    lire::InvertedLists ivf;
    std::unique_ptr<lire::Searcher> searcher;

    lire::Searcher& get_searcher() {
        if (!searcher) searcher = std::make_unique<lire::Searcher>(index, ivf);
        return *searcher;
    }
};

void append_array(lire::EmbeddingSet& set, uint64_t passage_id, const FloatArray& matrix) {
    const auto buf = matrix.request();
    if (buf.ndim != 2) {
        lire::fail(lire::ErrorKind::invalid_argument, "matrix must be 2-dimensional");
    }
    if (set.dim == 0) set.dim = static_cast<uint32_t>(buf.shape[1]);
    if (static_cast<uint32_t>(buf.shape[1]) != set.dim) {
        lire::fail(lire::ErrorKind::dimension_mismatch,
                   "matrix has " + std::to_string(buf.shape[1]) + " columns, set dim is " +
                       std::to_string(set.dim));
    }
    if (buf.shape[0] < 1) {
        lire::fail(lire::ErrorKind::invalid_argument, "matrix needs at least one row");
    }
    set.append_passage(passage_id, static_cast<const float*>(buf.ptr),
                       static_cast<uint32_t>(buf.shape[0]));
}

py::array passage_matrix(const lire::EmbeddingSet& set, size_t p) {
    if (p >= set.n_passages()) throw py::index_error("passage index out of range");
    const uint32_t m = set.doclens[p];
    py::array_t<float> out({static_cast<py::ssize_t>(m), static_cast<py::ssize_t>(set.dim)});
    std::copy_n(set.passage_rows(p), static_cast<size_t>(m) * set.dim,
                out.mutable_data());
    return out;
}

py::list results_to_py(const lire::RankedResults& results) {
    py::list out;
    for (const lire::QueryResult& qr : results) {
        py::list hits;
        for (const lire::ScoredPassage& hit : qr.hits) {
            hits.append(py::make_tuple(hit.passage_id, hit.score));
        }
        out.append(py::make_tuple(qr.query_id, hits));
    }
    return out;
}

lire::RankedResults results_from_py(const py::sequence& seq) {
    lire::RankedResults results;
    for (const auto& entry : seq) {
        const auto pair = entry.cast<py::sequence>();
        lire::QueryResult qr;
        qr.query_id = pair[0].cast<uint64_t>();
        for (const auto& hit : pair[1].cast<py::sequence>()) {
            const auto t = hit.cast<py::sequence>();
            qr.hits.push_back({t[0].cast<uint64_t>(), t[1].cast<double>()});
        }
        results.push_back(std::move(qr));
    }
    return results;
}

py::dict report_to_py(const lire::MetricReport& report) {
    py::dict out;
    out["name"] = report.name;
    out["mean"] = report.mean;
    out["evaluated"] = report.n_evaluated;
    out["skipped"] = report.n_skipped;
    py::dict per_query;
    for (const auto& [qid, value] : report.per_query) {
        per_query[py::int_(qid)] = value;
    }
    out["per_query"] = per_query;
    return out;
}

py::dict stats_to_py(const lire::IndexStats& s) {
    py::dict out;
    out["dim"] = s.dim;
    out["bits"] = s.bits;
    out["n_passages"] = s.n_passages;
    out["n_embeddings"] = s.n_embeddings;
    out["n_centroids"] = s.n_centroids;
    out["bytes_codes"] = s.bytes_codes;
    out["bytes_residuals"] = s.bytes_residuals;
    out["bytes_centroids"] = s.bytes_centroids;
    out["bytes_total"] = s.bytes_total;
    out["bytes_per_vector_core"] = s.bytes_per_vector_core;
    out["bytes_per_vector_total"] = s.bytes_per_vector_total;
    out["ratio_core"] = s.ratio_core;
    out["ratio_total"] = s.ratio_total;
    return out;
}

}  // namespace

PYBIND11_MODULE(lire, m) {
    m.doc() = "Storage-efficient late-interaction retrieval engine";
    m.attr("__version__") = "0.1.0";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const lire::Error& e) {
            switch (e.kind()) {
                case lire::ErrorKind::io_failure:
                    PyErr_SetString(PyExc_OSError, e.what());
                    break;
                case lire::ErrorKind::invalid_argument:
                case lire::ErrorKind::dimension_mismatch:
                    PyErr_SetString(PyExc_ValueError, e.what());
                    break;
                default:
                    PyErr_SetString(PyExc_RuntimeError, e.what());
            }
        }
    });

    py::class_<lire::EmbeddingSet>(m, "EmbeddingSet")
        .def(py::init<>())
        .def("add_passage", &append_array, py::arg("passage_id"), py::arg("matrix"))
        .def("matrix", &passage_matrix, py::arg("i"))
        .def("validate", &lire::EmbeddingSet::validate)
        .def_property_readonly("dim", [](const lire::EmbeddingSet& s) { return s.dim; })
        .def_property_readonly("n_passages",
                               [](const lire::EmbeddingSet& s) { return s.n_passages(); })
        .def_property_readonly("n_vectors",
                               [](const lire::EmbeddingSet& s) { return s.n_vectors(); })
        .def_property_readonly("passage_ids",
                               [](const lire::EmbeddingSet& s) { return s.passage_ids; })
        .def_property_readonly("doclens",
                               [](const lire::EmbeddingSet& s) { return s.doclens; });

    m.def("read_embeddings", &lire::read_embeddings, py::arg("path"));
    m.def("write_embeddings", &lire::write_embeddings, py::arg("set"), py::arg("path"));
    m.def("read_qrels", &lire::read_qrels, py::arg("path"));
    m.def("write_qrels", &lire::write_qrels, py::arg("qrels"), py::arg("path"));
    m.def(
        "read_results",
        [](const std::string& path) { return results_to_py(lire::read_results(path)); },
        py::arg("path"));
    m.def(
        "write_results",
        [](const py::sequence& results, const std::string& path) {
            lire::write_results(results_from_py(results), path);
        },
        py::arg("results"), py::arg("path"));

    m.def("select_num_centroids", &lire::select_num_centroids, py::arg("n_embeddings"));

    m.def(
        "maxsim",
        [](const FloatArray& q, const FloatArray& d) {
            const auto qb = q.request();
            const auto db = d.request();
            if (qb.ndim != 2 || db.ndim != 2) {
                lire::fail(lire::ErrorKind::invalid_argument, "maxsim expects 2-d arrays");
            }
            if (qb.shape[1] != db.shape[1]) {
                lire::fail(lire::ErrorKind::dimension_mismatch,
                           "query dim " + std::to_string(qb.shape[1]) + " vs doc dim " +
                               std::to_string(db.shape[1]));
            }
            return lire::maxsim(static_cast<const float*>(qb.ptr), qb.shape[0],
                                static_cast<const float*>(db.ptr), db.shape[0],
                                static_cast<uint32_t>(qb.shape[1]));
        },
        py::arg("queries"), py::arg("docs"),
        "Sum over query rows of the max dot product against doc rows.");

    py::class_<PyIndex>(m, "Index")
        .def_property_readonly("dim", [](const PyIndex& i) { return i.index.codec.dim; })
        .def_property_readonly("bits", [](const PyIndex& i) { return i.index.codec.bits; })
        .def_property_readonly("n_passages", [](const PyIndex& i) { return i.index.n_passages; })
        .def_property_readonly("n_embeddings",
                               [](const PyIndex& i) { return i.index.n_embeddings; })
        .def_property_readonly("n_centroids",
                               [](const PyIndex& i) { return i.index.codec.n_centroids; })
        .def("stats", [](const PyIndex& i) { return stats_to_py(index_stats(i.index, i.ivf)); })
        .def("save", [](const PyIndex& i, const std::string& dir) {
            lire::save_index(i.index, i.ivf, dir);
        });

    m.def(
        "build_index",
        [](const lire::EmbeddingSet& embeddings, uint32_t bits, uint64_t seed,
           uint32_t chunk_size, double sample_mult, int threads) {
            lire::BuildParams params;
            params.bits = bits;
            params.seed = seed;
            params.chunk_size = chunk_size;
            params.sample_mult = sample_mult;
            params.threads = threads;
            auto built = lire::build_index(embeddings, params);
            auto out = std::make_unique<PyIndex>();
            out->index = std::move(built.first);
            out->ivf = std::move(built.second);
            return out;
        },
        py::arg("embeddings"), py::arg("bits") = 2, py::arg("seed") = 0,
        py::arg("chunk_size") = 1024, py::arg("sample_mult") = 1.0, py::arg("threads") = 1);

    m.def(
        "load_index",
        [](const std::string& dir) {
            auto loaded = lire::load_index(dir);
            auto out = std::make_unique<PyIndex>();
            out->index = std::move(loaded.first);
            out->ivf = std::move(loaded.second);
            return out;
        },
        py::arg("dir"));

    m.def(
        "search",
        [](PyIndex& index, const lire::EmbeddingSet& queries, uint32_t nprobe,
           uint32_t ncandidates, uint32_t k, int threads) {
            lire::SearchParams params;
            params.nprobe = nprobe;
            params.ncandidates = ncandidates == 0 ? nprobe * 4096 : ncandidates;
            params.k = k;
            return results_to_py(index.get_searcher().search_batch(queries, params, threads));
        },
        py::arg("index"), py::arg("queries"), py::arg("nprobe") = 2,
        py::arg("ncandidates") = 0, py::arg("k") = 10, py::arg("threads") = 1);

    m.def(
        "brute_force_search",
        [](const lire::EmbeddingSet& queries, const lire::EmbeddingSet& corpus, uint32_t k) {
            return results_to_py(lire::brute_force_search(queries, corpus, k));
        },
        py::arg("queries"), py::arg("corpus"), py::arg("k") = 10);

    m.def(
        "brute_force_decoded",
        [](const lire::EmbeddingSet& queries, const PyIndex& index, uint32_t k, bool clamped) {
            return results_to_py(lire::brute_force_decoded(queries, index.index, k, clamped));
        },
        py::arg("queries"), py::arg("index"), py::arg("k") = 10, py::arg("clamped") = false);

    m.def(
        "mrr_at_k",
        [](const py::sequence& results, const lire::Qrels& qrels, uint32_t k) {
            return report_to_py(lire::mrr_at_k(results_from_py(results), qrels, k));
        },
        py::arg("results"), py::arg("qrels"), py::arg("k"));
    m.def(
        "success_at_k",
        [](const py::sequence& results, const lire::Qrels& qrels, uint32_t k) {
            return report_to_py(lire::success_at_k(results_from_py(results), qrels, k));
        },
        py::arg("results"), py::arg("qrels"), py::arg("k"));
    m.def(
        "recall_at_k",
        [](const py::sequence& results, const lire::Qrels& qrels, uint32_t k) {
            return report_to_py(lire::recall_at_k(results_from_py(results), qrels, k));
        },
        py::arg("results"), py::arg("qrels"), py::arg("k"));

    m.def(
        "synth",
        [](const std::string& profile, uint64_t n_passages, uint32_t tokens_per_passage,
           uint32_t dim, uint32_t n_clusters, double noise, uint64_t seed, uint64_t n_queries,
           uint32_t query_tokens) {
            lire::SynthParams params;
            params.profile = profile == "random" ? lire::SynthProfile::random
                                                 : lire::SynthProfile::clustered;
            if (profile != "random" && profile != "clustered") {
                lire::fail(lire::ErrorKind::invalid_argument,
                           "profile must be clustered or random");
            }
            params.n_passages = n_passages;
            params.tokens_per_passage = tokens_per_passage;
            params.dim = dim;
            params.n_clusters = n_clusters;
            params.noise = noise;
            params.seed = seed;
            params.n_queries = n_queries;
            params.query_tokens = query_tokens;
            lire::SynthData data = lire::synth(params);
            py::dict out;
            out["corpus"] = std::move(data.corpus);
            out["queries"] = std::move(data.queries);
            out["qrels"] = data.qrels;
            out["token_ids"] = data.token_ids;
            return out;
        },
        py::arg("profile") = "clustered", py::arg("n_passages") = 100,
        py::arg("tokens_per_passage") = 16, py::arg("dim") = 32, py::arg("n_clusters") = 64,
        py::arg("noise") = 0.1, py::arg("seed") = 0, py::arg("n_queries") = 16,
        py::arg("query_tokens") = 4);
}
