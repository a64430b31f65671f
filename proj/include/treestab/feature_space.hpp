#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "treestab/errors.hpp"
#include "treestab/util.hpp"

namespace treestab {

// Fixed-width bit set over a categorical feature's categories.
struct Mask {
    int n = 0;
    std::vector<uint64_t> bits;

    Mask() = default;
    explicit Mask(int size) : n(size), bits((size + 63) / 64, 0) {}

    static Mask full(int size) {
        Mask m(size);
        for (int i = 0; i < size; ++i) m.set(i);
        return m;
    }

    void set(int i) { bits[i / 64] |= (1ull << (i % 64)); }
    void reset(int i) { bits[i / 64] &= ~(1ull << (i % 64)); }
    bool test(int i) const { return (bits[i / 64] >> (i % 64)) & 1ull; }

    int count() const {
        int c = 0;
        for (uint64_t w : bits) c += std::popcount(w);
        return c;
    }

    bool any() const {
        for (uint64_t w : bits)
            if (w) return true;
        return false;
    }

    bool is_full() const { return count() == n; }

    int xor_count(const Mask& o) const {
        int c = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) c += std::popcount(bits[i] ^ o.bits[i]);
        return c;
    }

    Mask intersect(const Mask& o) const {
        Mask r(n);
        for (std::size_t i = 0; i < bits.size(); ++i) r.bits[i] = bits[i] & o.bits[i];
        return r;
    }

    Mask minus(const Mask& o) const {
        Mask r(n);
        for (std::size_t i = 0; i < bits.size(); ++i) r.bits[i] = bits[i] & ~o.bits[i];
        return r;
    }

    bool operator==(const Mask& o) const { return n == o.n && bits == o.bits; }

    std::vector<int> to_indices() const {
        std::vector<int> out;
        for (int i = 0; i < n; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }
};

enum class FeatureKind { Numeric, Categorical };

struct Feature {
    FeatureKind kind = FeatureKind::Numeric;
    std::string name;
    double lower = 0.0;  // numeric only
    double upper = 0.0;
    int cardinality = 0;  // categorical only
    std::vector<std::string> categories;

    double range() const { return upper - lower; }
};

// Feature index -> kind plus bounds/cardinality, and the label cardinality.
struct FeatureSpace {
    std::vector<Feature> features;
    int num_classes = 2;
    std::vector<std::string> class_names;

    int size() const { return static_cast<int>(features.size()); }

    void validate() const {
        require_data(!features.empty(), "feature space has no features");
        require_data(num_classes >= 2, "feature space needs at least two classes");
        for (std::size_t j = 0; j < features.size(); ++j) {
            const Feature& f = features[j];
            if (f.kind == FeatureKind::Numeric) {
                require_data(f.lower < f.upper, "feature " + std::to_string(j) +
                                                    ": lower bound must be below upper bound");
            } else {
                require_data(f.cardinality >= 2, "feature " + std::to_string(j) +
                                                     ": categorical cardinality must be >= 2");
            }
        }
        if (!class_names.empty())
            require_data(static_cast<int>(class_names.size()) == num_classes,
                         "class name list does not match the class count");
    }

    std::string canonical_repr() const {
        std::string s = "K=" + std::to_string(num_classes) + ";";
        for (const std::string& c : class_names) s += c + ",";
        s += "|";
        for (const Feature& f : features) {
            if (f.kind == FeatureKind::Numeric) {
                s += "N:" + f.name + ":" + fmt_full(f.lower) + ":" + fmt_full(f.upper) + ";";
            } else {
                s += "C:" + f.name + ":" + std::to_string(f.cardinality) + ":";
                for (const std::string& c : f.categories) s += c + ",";
                s += ";";
            }
        }
        return s;
    }

    std::string digest() const { return hex64(fnv1a64(canonical_repr())); }

    bool operator==(const FeatureSpace& o) const {
        return canonical_repr() == o.canonical_repr();
    }
};

}  // namespace treestab
