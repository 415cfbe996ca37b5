// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0
//
// A fixed five-model, four-language grid of RBO runs whose rendering is
// checked against tests/data/golden/rbo_table_5x4.md.

#pragma once

#include <string>
#include <vector>

#include "rankfair/bias_eval.hpp"

namespace rankfair::testing {

inline std::vector<EvalRun> golden_rbo_runs() {
    const std::vector<std::string> languages{"de", "es", "fr", "pt"};
    const std::vector<std::pair<std::string, std::vector<double>>> rows{
        {"encoder-a", {0.9060, 0.8871, 0.9123, 0.8990}},
        {"encoder-b", {0.8412, 0.8655, 0.8700, 0.9021}},
        {"encoder-c", {0.9377, 0.9060, 0.8512, 0.8809}},
        {"encoder-d", {0.7999, 0.8123, 0.9500, 0.8809}},
        {"encoder-e", {0.8650, 0.9102, 0.8888, 0.9300}},
    };
    std::vector<EvalRun> runs;
    // Languages outermost so row order must come from first appearance, not
    // from input grouping.
    for (std::size_t l = 0; l < languages.size(); ++l) {
        for (const auto& [model, values] : rows) {
            EvalRun run;
            run.language = languages[l];
            run.model_name = model;
            run.corpus_view = CorpusView::masculine_corpus;
            run.mean_rbo = {values[l], Metric::rbo_uniform, 1000};
            run.counts.rbo_evaluated = 100;
            runs.push_back(run);
        }
    }
    return runs;
}

}  // namespace rankfair::testing
