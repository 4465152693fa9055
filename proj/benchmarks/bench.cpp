// Microbenchmarks for the hot paths: token lexing, CBOW updates, the
// temporal convolution kernels, and whole-model forward/backward passes at
// the production configuration.  Shapes mirror what the pipeline actually
// runs, so regressions here translate directly into wall-clock training time.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <string>
#include <vector>

#include "csent/embed.hpp"
#include "csent/lex.hpp"
#include "csent/matrix.hpp"
#include "csent/model.hpp"
#include "csent/nn.hpp"
#include "csent/rng.hpp"

namespace {

using namespace csent;

const char* kJavaSource = R"(package com.example.auth;

import java.util.List;
import java.util.Map;

/** Session token validation with expiry and audience checks. */
public final class TokenValidator {
    private static final long MAX_AGE_MS = 15 * 60 * 1000L;
    private final Map<String, List<String>> audiences;

    public TokenValidator(Map<String, List<String>> audiences) {
        this.audiences = audiences;
    }

    // Reject anything that is expired, malformed, or replayed.
    public boolean validate(String token, long now) {
        if (token == null || token.isEmpty()) {
            return false;
        }
        String[] parts = token.split("\\.", 3);
        if (parts.length != 3) {
            throw new IllegalArgumentException("malformed token: " + token);
        }
        long issued = Long.parseLong(parts[1], 16);
        if (now - issued > MAX_AGE_MS || issued > now) {
            return false;
        }
        return audiences.containsKey(parts[0]) && verify(parts[2], 0x7f);
    }

    private boolean verify(String signature, int mask) {
        int acc = 0;
        for (char c : signature.toCharArray()) {
            acc = (acc * 31 + c) & mask;
        }
        return acc != 0;
    }
}
)";

template <typename S>
void fill_random(Matrix<S>& m, Rng& rng, double half) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        m.data()[i] = static_cast<S>(rng.uniform(-half, half));
    }
}

std::vector<int> random_ids(std::size_t n, std::size_t vocab, Rng& rng) {
    std::vector<int> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(6 + static_cast<int>(rng.below(vocab - 6)));
    }
    return ids;
}

void BM_Tokenize(benchmark::State& state) {
    const std::string src(kJavaSource);
    LexOptions opts;
    opts.recover = true;
    for (auto _ : state) {
        TokenStream ts = tokenize(src, "TokenValidator.java", opts);
        benchmark::DoNotOptimize(ts.tokens.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(src.size()));
}
BENCHMARK(BM_Tokenize);

void BM_CbowStep(benchmark::State& state) {
    const std::size_t vocab = 5000, dim = 300;
    Rng rng(1);
    EmbeddingMatrix emb;
    emb.vectors = Matrix<double>(vocab, dim);
    emb.output_vectors = Matrix<double>(vocab, dim);
    fill_random(emb.vectors, rng, 0.01);
    fill_random(emb.output_vectors, rng, 0.01);
    const std::vector<int> context = random_ids(8, vocab, rng);
    const std::vector<int> negatives = random_ids(5, vocab, rng);
    const int target = 6 + static_cast<int>(rng.below(vocab - 6));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            cbow_step(emb, context, target, negatives, 0.025));
    }
}
BENCHMARK(BM_CbowStep);

void BM_TemporalConvForward(benchmark::State& state) {
    const std::size_t t = 200, d = 300, w = 5, f = 100;
    Rng rng(2);
    Matrix<float> input(t, d), filters(w * d, f), bias(1, f);
    fill_random(input, rng, 0.5);
    fill_random(filters, rng, 0.05);
    fill_random(bias, rng, 0.05);
    for (auto _ : state) {
        nn::ConvCache<float> cache;
        Matrix<float> out = nn::temporal_conv_forward(input, w, filters, bias,
                                                      cache);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_TemporalConvForward);

void BM_TemporalConvBackward(benchmark::State& state) {
    const std::size_t t = 200, d = 300, w = 5, f = 100;
    Rng rng(3);
    Matrix<float> input(t, d), filters(w * d, f), bias(1, f);
    fill_random(input, rng, 0.5);
    fill_random(filters, rng, 0.05);
    fill_random(bias, rng, 0.05);
    nn::ConvCache<float> cache;
    nn::temporal_conv_forward(input, w, filters, bias, cache);
    Matrix<float> grad_out(t - w + 1, f);
    fill_random(grad_out, rng, 0.1);
    Matrix<float> grad_filters(w * d, f), grad_bias(1, f);
    for (auto _ : state) {
        grad_filters.zero();
        grad_bias.zero();
        Matrix<float> gx = nn::temporal_conv_backward(grad_out, cache, filters,
                                                      grad_filters, grad_bias);
        benchmark::DoNotOptimize(gx.data());
    }
}
BENCHMARK(BM_TemporalConvBackward);

HierarchicalCnn<float> production_model(ModelVariant variant,
                                        std::size_t vocab) {
    HcnnConfig cfg;  // production defaults: 300-d, windows {3,5,7}
    HierarchicalCnn<float> model(variant, cfg, vocab, "bench");
    Rng init(4);
    model.init_random(init);
    return model;
}

void BM_HcnnForward(benchmark::State& state) {
    const std::size_t vocab = 5000;
    HierarchicalCnn<float> model =
        production_model(ModelVariant::DiffHcnn, vocab);
    Rng rng(5);
    DiffInput input{{random_ids(120, vocab, rng), random_ids(80, vocab, rng)}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.predict(input).probability_security);
    }
}
BENCHMARK(BM_HcnnForward);

void BM_HcnnTrainStep(benchmark::State& state) {
    const std::size_t vocab = 5000;
    HierarchicalCnn<float> model =
        production_model(ModelVariant::DiffHrcnn, vocab);
    Rng rng(6);
    DiffInput input{{random_ids(120, vocab, rng), random_ids(80, vocab, rng)}};
    Rng train_rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.train_step(input, 1, train_rng, 0.125));
    }
}
BENCHMARK(BM_HcnnTrainStep);

void BM_LrTrainStep(benchmark::State& state) {
    const std::size_t vocab = 5000;
    LrBaseline<float> model(vocab, "bench");
    Rng rng(8);
    const std::vector<int> ids = random_ids(300, vocab, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.train_step(ids, 1, 0.125));
    }
}
BENCHMARK(BM_LrTrainStep);

}  // namespace

BENCHMARK_MAIN();
