#include "ambra/buffer.hpp"

#include <algorithm>

namespace ambra {

const char* to_string(ChannelOrdering ordering) {
    return ordering == ChannelOrdering::ACN ? "acn" : "fuma";
}

std::string Convention::str() const {
    return std::string(to_string(ordering)) + "/" + to_string(normalization);
}

void validate_convention(const Convention& convention, int order) {
    if (convention.ordering == ChannelOrdering::FuMa &&
        convention.normalization != Normalization::FuMa)
        throw UnsupportedConvention(
            "FuMa channel ordering requires FuMa normalization, got " + convention.str());
    if ((convention.ordering == ChannelOrdering::FuMa ||
         convention.normalization == Normalization::FuMa) &&
        order > 3)
        throw UnsupportedConvention("FuMa is limited to 3rd order, got order " +
                                    std::to_string(order));
}

AmbisonicBuffer::AmbisonicBuffer(double sample_rate, int order, Convention convention,
                                 std::size_t frames)
    : sample_rate_(sample_rate), order_(order), convention_(convention) {
    if (sample_rate <= 0.0)
        throw InvalidArgument("sample rate must be positive");
    validate_convention(convention, order);
    samples_ = SampleMatrix(static_cast<std::size_t>(channel_count(order)), frames);
}

void AmbisonicBuffer::require_canonical(const char* operation) const {
    if (!is_canonical())
        throw InvalidArgument(std::string(operation) +
                              " expects the canonical acn/sn3d convention, got " +
                              convention_.str());
}

int acn_from_fuma_index(int fuma_index) {
    // Furse-Malham sequence W X Y Z | R S T U V | K L M N O P Q.
    static constexpr int kAcnOfFuma[16] = {0, 3,  1,  2,  6, 7,  5,  8,
                                           4, 12, 13, 11, 14, 10, 15, 9};
    if (fuma_index < 0 || fuma_index >= 16)
        throw UnsupportedConvention("FuMa channel index out of range: " +
                                    std::to_string(fuma_index));
    return kAcnOfFuma[fuma_index];
}

AmbisonicBuffer convert_convention(const AmbisonicBuffer& buffer, Convention target) {
    validate_convention(target, buffer.order());
    const Convention source = buffer.convention();
    if (source == target) return buffer;

    const int channels = static_cast<int>(buffer.channels());
    AmbisonicBuffer out(buffer.sample_rate(), buffer.order(), target, buffer.frames());

    for (int dst = 0; dst < channels; ++dst) {
        // Identify the mode stored in the destination slot, find its source
        // slot, and apply the normalization change.
        const int acn = target.ordering == ChannelOrdering::FuMa ? acn_from_fuma_index(dst) : dst;
        const ModeIndex mode = mode_from_acn(acn);
        int src = acn;
        if (source.ordering == ChannelOrdering::FuMa) {
            src = -1;
            for (int i = 0; i < channels; ++i)
                if (acn_from_fuma_index(i) == acn) src = i;
        }
        const double gain =
            normalization_gain(mode, source.normalization, target.normalization);
        const auto in = buffer.channel(static_cast<std::size_t>(src));
        auto dst_span = out.channel(static_cast<std::size_t>(dst));
        for (std::size_t i = 0; i < in.size(); ++i) dst_span[i] = gain * in[i];
    }
    return out;
}

}  // namespace ambra
