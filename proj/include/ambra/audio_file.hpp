#pragma once

#include <filesystem>
#include <optional>

#include "ambra/buffer.hpp"

namespace ambra {

enum class Container { WAV, CAF, AMB };

const char* to_string(Container container);

struct FormatMeta {
    Container container = Container::WAV;
    Convention convention = Convention::canonical();
    int order = -1;  // -1: derive from the channel count
};

// Plain multichannel audio, no ambisonic interpretation.
struct MultichannelBuffer {
    double sample_rate = 0.0;
    SampleMatrix samples;
};

// Decodes a WAV (PCM16/PCM24/float32, plus WAVE_FORMAT_EXTENSIBLE) or CAF
// (linear PCM) file. Integer PCM is scaled to [-1, 1].
MultichannelBuffer read_pcm(const std::filesystem::path& path);

// float32 writers; the produced files read back bit-exactly.
void write_pcm_wav(const MultichannelBuffer& buffer, const std::filesystem::path& path);
void write_pcm_caf(const MultichannelBuffer& buffer, const std::filesystem::path& path);

// Container and default convention implied by a file name. The plain .wav
// default carries no convention; callers need a hint or sidecar.
Container container_from_extension(const std::filesystem::path& path);

// Sidecar metadata (<name>.meta.json) carried next to plain .wav files.
std::filesystem::path sidecar_path(const std::filesystem::path& audio_path);

// Reads an ambisonic signal. Convention resolution: explicit hint, else
// sidecar file, else extension default (.amb -> fuma, .caf -> acn/sn3d);
// a bare .wav without metadata is an error, never a guess.
AmbisonicBuffer read_audio(const std::filesystem::path& path,
                           const std::optional<FormatMeta>& hint = std::nullopt);

// Writes `buffer` converted to the target convention. WAV targets get a
// sidecar; AMB refuses orders above 3; CAF is fixed to acn/sn3d (AmbiX).
void write_audio(const AmbisonicBuffer& buffer, const std::filesystem::path& path,
                 const FormatMeta& target);

// Target meta implied by the output extension for a buffer of this order.
FormatMeta meta_from_extension(const std::filesystem::path& path, int order);

}  // namespace ambra
