#pragma once

#include <span>
#include <string>
#include <vector>

#include "ambra/sh.hpp"

namespace ambra {

// Channel-major sample storage shared by ambisonic buffers, speaker feeds,
// and plain multichannel audio.
class SampleMatrix {
public:
    SampleMatrix() = default;
    SampleMatrix(std::size_t channels, std::size_t frames)
        : channels_(channels), frames_(frames), data_(channels * frames, 0.0) {}

    std::size_t channels() const { return channels_; }
    std::size_t frames() const { return frames_; }

    std::span<double> channel(std::size_t ch) {
        return {data_.data() + ch * frames_, frames_};
    }
    std::span<const double> channel(std::size_t ch) const {
        return {data_.data() + ch * frames_, frames_};
    }
    double& at(std::size_t ch, std::size_t frame) { return data_[ch * frames_ + frame]; }
    double at(std::size_t ch, std::size_t frame) const { return data_[ch * frames_ + frame]; }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }

    bool operator==(const SampleMatrix&) const = default;

private:
    std::size_t channels_ = 0;
    std::size_t frames_ = 0;
    std::vector<double> data_;
};

enum class ChannelOrdering { ACN, FuMa };

const char* to_string(ChannelOrdering ordering);

// Channel ordering + normalization pair. FuMa ordering only pairs with
// FuMa normalization, and only up to order 3.
struct Convention {
    ChannelOrdering ordering = ChannelOrdering::ACN;
    Normalization normalization = Normalization::SN3D;

    bool operator==(const Convention&) const = default;
    std::string str() const;

    static Convention canonical() { return {ChannelOrdering::ACN, Normalization::SN3D}; }
    static Convention fuma() { return {ChannelOrdering::FuMa, Normalization::FuMa}; }
};

// Throws UnsupportedConvention if the pair is invalid for the given order.
void validate_convention(const Convention& convention, int order);

// The central value of the pipeline: (order+1)^2 channels of samples plus
// rate and convention metadata.
class AmbisonicBuffer {
public:
    AmbisonicBuffer() = default;
    AmbisonicBuffer(double sample_rate, int order, Convention convention,
                    std::size_t frames);

    double sample_rate() const { return sample_rate_; }
    int order() const { return order_; }
    const Convention& convention() const { return convention_; }
    std::size_t channels() const { return samples_.channels(); }
    std::size_t frames() const { return samples_.frames(); }

    SampleMatrix& samples() { return samples_; }
    const SampleMatrix& samples() const { return samples_; }
    std::span<double> channel(std::size_t ch) { return samples_.channel(ch); }
    std::span<const double> channel(std::size_t ch) const { return samples_.channel(ch); }

    bool is_canonical() const { return convention_ == Convention::canonical(); }
    void require_canonical(const char* operation) const;

private:
    double sample_rate_ = 0.0;
    int order_ = 0;
    Convention convention_ = Convention::canonical();
    SampleMatrix samples_;
};

// Permutes and rescales channels so the represented sound field is
// unchanged. Exact (permutation plus per-channel scalar).
AmbisonicBuffer convert_convention(const AmbisonicBuffer& buffer, Convention target);

// ACN index of FuMa channel `i` (W X Y Z R S T U V K L M N O P Q), order <= 3.
int acn_from_fuma_index(int fuma_index);

}  // namespace ambra
