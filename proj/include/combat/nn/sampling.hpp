#pragma once
#include <vector>

#include "combat/rng.hpp"

namespace combat::nn {

// Max-shifted softmax; safe for large-magnitude logits.
std::vector<double> softmax(const double* logits, int n);

// Shannon entropy in nats; zero-probability terms contribute nothing.
double entropy(const std::vector<double>& probs);

// Draws an index from the distribution (inverse CDF walk).
int sample_index(const std::vector<double>& probs, Rng& rng);

// Greedy pick; the first maximum wins ties.
int argmax(const double* logits, int n);

}  // namespace combat::nn
