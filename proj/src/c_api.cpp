#include "tracesim/tracesim.h"

#include "tracesim/error.hpp"
#include "tracesim/experiment.hpp"
#include "tracesim/harness.hpp"
#include "tracesim/metrics.hpp"
#include "tracesim/netgen.hpp"
#include "tracesim/network_io.hpp"

#include <algorithm>
#include <cstring>
#include <string>

struct ts_network {
    tracesim::ContactNetwork net;
};

struct ts_experiment {
    tracesim::ExperimentSpec spec;
};

namespace {

thread_local std::string last_error;

template <typename F>
ts_status guarded(F&& body)
{
    try {
        body();
        return TS_OK;
    } catch (const tracesim::ParameterError& e) {
        last_error = e.what();
        return TS_ERR_PARAMETER;
    } catch (const std::invalid_argument& e) {
        last_error = e.what();
        return TS_ERR_PARAMETER;
    } catch (const tracesim::FormatError& e) {
        last_error = e.what();
        return TS_ERR_FORMAT;
    } catch (const tracesim::IoError& e) {
        last_error = e.what();
        return TS_ERR_IO;
    } catch (const std::filesystem::filesystem_error& e) {
        last_error = e.what();
        return TS_ERR_IO;
    } catch (const std::exception& e) {
        last_error = e.what();
        return TS_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return TS_ERR_INTERNAL;
    }
}

ts_status null_argument(const char* name)
{
    last_error = std::string("null argument: ") + name;
    return TS_ERR_PARAMETER;
}

} // namespace

extern "C" {

const char* ts_last_error(void) { return last_error.c_str(); }

const char* ts_version(void) { return "0.1.0"; }

ts_status ts_network_generate(const char* kind, double k, double r0, double beta, double gamma, uint64_t n,
                              uint64_t seed, ts_network** out)
{
    if (!kind)
        return null_argument("kind");
    if (!out)
        return null_argument("out");
    return guarded([&] {
        tracesim::Cell cell;
        cell.network_kind = tracesim::parse_network_kind(kind);
        cell.k = k;
        cell.R0 = r0;
        cell.beta = beta;
        cell.gamma = gamma;
        cell.N = n;
        *out = new ts_network{tracesim::generate_cell_network(cell, seed, tracesim::default_tail_mass)};
    });
}

ts_status ts_network_read(const char* path, ts_network** out)
{
    if (!path)
        return null_argument("path");
    if (!out)
        return null_argument("out");
    return guarded([&] { *out = new ts_network{tracesim::read_network(path)}; });
}

ts_status ts_network_write(const ts_network* net, const char* path)
{
    if (!net)
        return null_argument("net");
    if (!path)
        return null_argument("path");
    return guarded([&] { tracesim::write_network(net->net, path); });
}

uint64_t ts_network_node_count(const ts_network* net) { return net ? net->net.node_count() : 0; }

uint64_t ts_network_edge_count(const ts_network* net) { return net ? net->net.edge_count() : 0; }

void ts_network_free(ts_network* net) { delete net; }

ts_status ts_experiment_create(const char* profile, ts_experiment** out)
{
    if (!out)
        return null_argument("out");
    return guarded([&] {
        const std::string name = profile ? profile : "paper";
        if (name == "paper")
            *out = new ts_experiment{};
        else if (name == "desk")
            *out = new ts_experiment{tracesim::ExperimentSpec::desk_profile()};
        else
            throw tracesim::ParameterError("unknown profile '" + name + "' (expected paper or desk)");
    });
}

ts_status ts_experiment_load_config(ts_experiment* exp, const char* path)
{
    if (!exp)
        return null_argument("exp");
    if (!path)
        return null_argument("path");
    return guarded([&] { exp->spec = tracesim::ExperimentSpec::parse_file(path, exp->spec); });
}

ts_status ts_experiment_set(ts_experiment* exp, const char* key, const char* value)
{
    if (!exp)
        return null_argument("exp");
    if (!key || !value)
        return null_argument("key/value");
    return guarded([&] { exp->spec.set(key, value); });
}

ts_status ts_experiment_apply_preset(ts_experiment* exp, const char* name)
{
    if (!exp)
        return null_argument("exp");
    if (!name)
        return null_argument("name");
    return guarded([&] { exp->spec.apply_preset(tracesim::load_preset(name)); });
}

ts_status ts_experiment_dump(const ts_experiment* exp, char* buffer, size_t capacity, size_t* needed)
{
    if (!exp)
        return null_argument("exp");
    const std::string text = exp->spec.dump();
    if (needed)
        *needed = text.size() + 1;
    if (!buffer || capacity < text.size() + 1) {
        last_error = "buffer too small for config dump";
        return TS_ERR_BUFFER_TOO_SMALL;
    }
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    return TS_OK;
}

ts_status ts_experiment_run(ts_experiment* exp, size_t* cells_ok, size_t* cells_failed)
{
    if (!exp)
        return null_argument("exp");
    std::size_t ok = 0, failed = 0;
    const ts_status status = guarded([&] {
        const auto result = tracesim::run_experiment(exp->spec);
        ok = result.aggregates.size();
        failed = result.failures.size();
    });
    if (cells_ok)
        *cells_ok = ok;
    if (cells_failed)
        *cells_failed = failed;
    if (status == TS_OK && failed > 0) {
        last_error = std::to_string(failed) + " cell(s) failed";
        return TS_ERR_CELLS_FAILED;
    }
    return status;
}

void ts_experiment_free(ts_experiment* exp) { delete exp; }

ts_status ts_estimate_k_from_file(const char* path, uint64_t first_m, double* k, double* mean,
                                  uint64_t* sample_size)
{
    if (!path)
        return null_argument("path");
    return guarded([&] {
        auto counts = tracesim::read_secondary_counts(std::filesystem::path(path));
        counts.resize(std::min<std::size_t>(counts.size(), first_m));
        const auto est = tracesim::estimate_dispersion(counts);
        if (k)
            *k = est.k_hat;
        if (mean)
            *mean = est.mean_hat;
        if (sample_size)
            *sample_size = est.sample_size;
    });
}

} // extern "C"
