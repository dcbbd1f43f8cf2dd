#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selval/dataset.hpp"

namespace selval {

struct ImpulseComponent {
    double weight = 1.0;
    double confidence = 1.0;  // top-class score, in [1/K, 1]
    double accuracy = 1.0;
};

// A model whose top confidence takes finitely many values, each with an exact
// accuracy. Counts per component are weight * items rounded half-up, with the
// last component taking the remainder; each component has exactly
// round(accuracy * count) correct items.
struct ImpulseSpec {
    std::vector<ImpulseComponent> components;
    int num_classes = 10;
    int items = 1000;
    std::uint64_t seed = 0;
};

// Named presets: m1 (conf 0.6 / acc 0.6), m2 (half 0.9/0.9, half 0.1/0.1) and
// m3 (half 0.9/0.9, half 0.3/0.3).
ImpulseSpec impulse_preset(const std::string& model, int items = 1000, std::uint64_t seed = 0,
                           int num_classes = 10);

// Item order, predicted classes and wrong labels depend only on the seed,
// the class count and the per-component counts, never on the confidences.
// Two specs that differ only in confidence values therefore produce the same
// predictions for every id.
LabeledDataset generate_impulse(const ImpulseSpec& spec, const std::string& name = "impulse");

// Perfectly calibrated data: scores ~ symmetric Dirichlet(concentration),
// true label ~ Categorical(scores).
LabeledDataset generate_calibrated(int items, int num_classes, double concentration,
                                   std::uint64_t seed, const std::string& name = "calibrated");

// softmax(log p / temperature) on every record; labels untouched.
LabeledDataset distort(const LabeledDataset& data, double temperature);

} // namespace selval
