#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace memsched {

// Binary activation vector: the subset of channels one round-robin round
// serves.  The all-zero vector is excluded.
class ActivationVector {
public:
    ActivationVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto b : bits_)
            if (b) ++count_;
        if (count_ == 0)
            throw std::invalid_argument("activation vector: at least one channel must be active");
    }

    static ActivationVector from_mask(std::uint64_t mask, int n) {
        std::vector<std::uint8_t> bits(n, 0);
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) bits[i] = 1;
        return ActivationVector(std::move(bits));
    }

    // "1101" style string, channel 1 first
    static ActivationVector from_string(const std::string& s) {
        std::vector<std::uint8_t> bits;
        bits.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1')
                throw std::invalid_argument("activation vector string must be only 0/1");
            bits.push_back(c == '1');
        }
        return ActivationVector(std::move(bits));
    }

    int size() const { return static_cast<int>(bits_.size()); }
    int count() const { return count_; } // M(phi)
    bool active(int n) const { return bits_[n] != 0; }

    std::uint64_t mask() const {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) m |= (1ULL << i);
        return m;
    }

    std::vector<int> active_indices() const {
        std::vector<int> idx;
        idx.reserve(count_);
        for (int i = 0; i < size(); ++i)
            if (bits_[i]) idx.push_back(i);
        return idx;
    }

    std::string to_string() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) s[i] = '1';
        return s;
    }

    friend bool operator==(const ActivationVector& a, const ActivationVector& b) {
        return a.bits_ == b.bits_;
    }

private:
    std::vector<std::uint8_t> bits_;
    int count_ = 0;
};

} // namespace memsched
