#include "ambra/audio_file.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ambra {

namespace {

using json = nlohmann::json;

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

// ---------------------------------------------------------------------------
// Binary reader with position tracking for parse diagnostics.

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open " + path.string());
        data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    std::uint64_t pos() const { return pos_; }
    std::uint64_t size() const { return data_.size(); }
    std::uint64_t remaining() const { return data_.size() - pos_; }

    void require(std::uint64_t bytes, const char* what) const {
        if (remaining() < bytes)
            throw ParseError(std::string("truncated file while reading ") + what, pos_);
    }
    void skip(std::uint64_t bytes, const char* what) {
        require(bytes, what);
        pos_ += bytes;
    }
    void seek(std::uint64_t pos) { pos_ = pos; }

    std::string fourcc() {
        require(4, "chunk id");
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), 4);
        pos_ += 4;
        return s;
    }
    std::uint16_t u16le() { return static_cast<std::uint16_t>(byte() | byte() << 8); }
    std::uint32_t u32le() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
        return v;
    }
    std::uint16_t u16be() { return static_cast<std::uint16_t>(byte() << 8 | byte()); }
    std::uint32_t u32be() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | byte();
        return v;
    }
    std::int64_t i64be() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | byte();
        return static_cast<std::int64_t>(v);
    }
    double f64be() { return std::bit_cast<double>(static_cast<std::uint64_t>(i64be())); }

    const std::uint8_t* bytes_at(std::uint64_t pos) const { return data_.data() + pos; }

private:
    std::uint8_t byte() {
        require(1, "value");
        return data_[pos_++];
    }

    std::filesystem::path path_;
    std::vector<std::uint8_t> data_;
    std::uint64_t pos_ = 0;
};

enum class SampleCodec { PCM16, PCM24, Float32 };

std::size_t bytes_per_sample(SampleCodec codec) {
    switch (codec) {
        case SampleCodec::PCM16: return 2;
        case SampleCodec::PCM24: return 3;
        case SampleCodec::Float32: return 4;
    }
    return 0;
}

double decode_sample(const std::uint8_t* p, SampleCodec codec, bool big_endian) {
    switch (codec) {
        case SampleCodec::PCM16: {
            const std::uint16_t u = big_endian
                                        ? static_cast<std::uint16_t>(p[0] << 8 | p[1])
                                        : static_cast<std::uint16_t>(p[1] << 8 | p[0]);
            return static_cast<std::int16_t>(u) / 32768.0;
        }
        case SampleCodec::PCM24: {
            std::uint32_t u = big_endian
                                  ? static_cast<std::uint32_t>(p[0]) << 16 |
                                        static_cast<std::uint32_t>(p[1]) << 8 | p[2]
                                  : static_cast<std::uint32_t>(p[2]) << 16 |
                                        static_cast<std::uint32_t>(p[1]) << 8 | p[0];
            if (u & 0x800000u) u |= 0xFF000000u;
            return static_cast<std::int32_t>(u) / 8388608.0;
        }
        case SampleCodec::Float32: {
            std::uint32_t u = big_endian
                                  ? static_cast<std::uint32_t>(p[0]) << 24 |
                                        static_cast<std::uint32_t>(p[1]) << 16 |
                                        static_cast<std::uint32_t>(p[2]) << 8 | p[3]
                                  : static_cast<std::uint32_t>(p[3]) << 24 |
                                        static_cast<std::uint32_t>(p[2]) << 16 |
                                        static_cast<std::uint32_t>(p[1]) << 8 | p[0];
            return static_cast<double>(std::bit_cast<float>(u));
        }
    }
    return 0.0;
}

MultichannelBuffer deinterleave(const Reader& reader, std::uint64_t data_pos,
                                std::uint64_t data_size, std::size_t channels,
                                double sample_rate, SampleCodec codec, bool big_endian) {
    const std::size_t stride = bytes_per_sample(codec);
    const std::uint64_t frame_bytes = channels * stride;
    if (frame_bytes == 0 || data_size % frame_bytes != 0)
        throw ParseError("audio data size " + std::to_string(data_size) +
                             " is not a whole number of frames",
                         data_pos);
    const std::uint64_t frames = data_size / frame_bytes;

    MultichannelBuffer out;
    out.sample_rate = sample_rate;
    out.samples = SampleMatrix(channels, static_cast<std::size_t>(frames));
    const std::uint8_t* p = reader.bytes_at(data_pos);
    for (std::uint64_t i = 0; i < frames; ++i)
        for (std::size_t ch = 0; ch < channels; ++ch) {
            out.samples.at(ch, static_cast<std::size_t>(i)) =
                decode_sample(p, codec, big_endian);
            p += stride;
        }
    return out;
}

// ---------------------------------------------------------------------------
// WAV / RIFF

constexpr std::uint16_t kWavPcm = 1;
constexpr std::uint16_t kWavFloat = 3;
constexpr std::uint16_t kWavExtensible = 0xFFFE;

MultichannelBuffer read_wav(Reader& reader) {
    if (reader.fourcc() != "RIFF") throw ParseError("missing RIFF signature", 0);
    reader.u32le();  // riff size; trust chunk walking instead
    if (reader.fourcc() != "WAVE") throw ParseError("missing WAVE form type", 8);

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::uint64_t data_pos = 0, data_size = 0;
    bool have_data = false;

    while (reader.remaining() >= 8) {
        const std::uint64_t chunk_pos = reader.pos();
        const std::string id = reader.fourcc();
        const std::uint32_t size = reader.u32le();
        if (id == "fmt ") {
            if (size < 16) throw ParseError("fmt chunk too small", chunk_pos);
            const std::uint64_t body = reader.pos();
            format = reader.u16le();
            channels = reader.u16le();
            rate = reader.u32le();
            reader.u32le();  // byte rate
            reader.u16le();  // block align
            bits = reader.u16le();
            if (format == kWavExtensible) {
                if (size < 40)
                    throw ParseError("extensible fmt chunk too small", chunk_pos);
                reader.u16le();  // cbSize
                reader.u16le();  // valid bits
                reader.u32le();  // channel mask
                format = reader.u16le();  // first GUID bytes carry the codec
            }
            have_fmt = true;
            reader.seek(body);
            reader.skip(size, "fmt chunk");
        } else if (id == "data") {
            data_pos = reader.pos();
            data_size = size;
            have_data = true;
            reader.skip(size, "data chunk");
        } else {
            reader.skip(size, "chunk body");
        }
        if (size % 2 == 1 && reader.remaining() > 0) reader.skip(1, "chunk padding");
    }

    if (!have_fmt) throw ParseError("no fmt chunk found", reader.size());
    if (!have_data) throw ParseError("no data chunk found", reader.size());
    if (channels == 0) throw ParseError("zero channels in fmt chunk", 0);

    SampleCodec codec;
    if (format == kWavPcm && bits == 16) codec = SampleCodec::PCM16;
    else if (format == kWavPcm && bits == 24) codec = SampleCodec::PCM24;
    else if (format == kWavFloat && bits == 32) codec = SampleCodec::Float32;
    else
        throw UnsupportedFormat("unsupported WAV codec: format " + std::to_string(format) +
                                ", " + std::to_string(bits) + " bits");

    return deinterleave(reader, data_pos, data_size, channels, rate, codec, false);
}

class Writer {
public:
    void fourcc(const char* s) { buf_.insert(buf_.end(), s, s + 4); }
    void u16le(std::uint16_t v) {
        buf_.push_back(static_cast<char>(v & 0xFF));
        buf_.push_back(static_cast<char>(v >> 8));
    }
    void u32le(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>(v >> (8 * i) & 0xFF));
    }
    void u16be(std::uint16_t v) {
        buf_.push_back(static_cast<char>(v >> 8));
        buf_.push_back(static_cast<char>(v & 0xFF));
    }
    void u32be(std::uint32_t v) {
        for (int i = 3; i >= 0; --i) buf_.push_back(static_cast<char>(v >> (8 * i) & 0xFF));
    }
    void i64be(std::int64_t v) {
        const auto u = static_cast<std::uint64_t>(v);
        for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<char>(u >> (8 * i) & 0xFF));
    }
    void f64be(double v) { i64be(static_cast<std::int64_t>(std::bit_cast<std::uint64_t>(v))); }
    void f32le(float v) { u32le(std::bit_cast<std::uint32_t>(v)); }
    void f32be(float v) { u32be(std::bit_cast<std::uint32_t>(v)); }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        if (!out) throw IoError("failed writing " + path.string());
    }

private:
    std::vector<char> buf_;
};

}  // namespace

MultichannelBuffer read_pcm(const std::filesystem::path& path) {
    Reader reader(path);
    if (reader.size() < 4) throw ParseError("file too small for any container", 0);
    const std::string magic(reinterpret_cast<const char*>(reader.bytes_at(0)), 4);
    if (magic == "RIFF") return read_wav(reader);
    if (magic == "caff") {
        // CAF: big-endian header fields throughout.
        reader.skip(4, "magic");
        const std::uint16_t version = reader.u16be();
        if (version != 1)
            throw ParseError("unsupported CAF version " + std::to_string(version), 4);
        reader.u16be();  // flags

        bool have_desc = false;
        double rate = 0.0;
        std::uint32_t format_flags = 0, channels = 0, bits = 0;
        while (reader.remaining() >= 12) {
            const std::uint64_t chunk_pos = reader.pos();
            const std::string id = reader.fourcc();
            const std::int64_t size = reader.i64be();
            if (id == "desc") {
                if (size < 32) throw ParseError("desc chunk too small", chunk_pos);
                const std::uint64_t body = reader.pos();
                rate = reader.f64be();
                const std::string fmt = reader.fourcc();
                if (fmt != "lpcm")
                    throw UnsupportedFormat("unsupported CAF codec '" + fmt +
                                            "'; only linear PCM is supported");
                format_flags = reader.u32be();
                reader.u32be();  // bytes per packet
                reader.u32be();  // frames per packet
                channels = reader.u32be();
                bits = reader.u32be();
                have_desc = true;
                reader.seek(body);
                reader.skip(static_cast<std::uint64_t>(size), "desc chunk");
            } else if (id == "data") {
                if (!have_desc)
                    throw ParseError("data chunk precedes desc chunk", chunk_pos);
                reader.u32be();  // edit count
                std::uint64_t data_size;
                if (size < 0)
                    data_size = reader.remaining();  // -1: audio runs to EOF
                else
                    data_size = static_cast<std::uint64_t>(size) - 4;
                const bool is_float = format_flags & 1u;
                const bool little = format_flags & 2u;
                SampleCodec codec;
                if (is_float && bits == 32) codec = SampleCodec::Float32;
                else if (!is_float && bits == 16) codec = SampleCodec::PCM16;
                else if (!is_float && bits == 24) codec = SampleCodec::PCM24;
                else
                    throw UnsupportedFormat("unsupported CAF sample format: " +
                                            std::to_string(bits) +
                                            (is_float ? " bit float" : " bit int"));
                if (channels == 0) throw ParseError("zero channels in desc chunk", chunk_pos);
                reader.require(data_size, "audio data");
                return deinterleave(reader, reader.pos(), data_size, channels, rate, codec,
                                    !little);
            } else {
                if (size < 0) throw ParseError("non-data chunk with unknown size", chunk_pos);
                reader.skip(static_cast<std::uint64_t>(size), "chunk body");
            }
        }
        throw ParseError("no data chunk found", reader.size());
    }
    throw UnsupportedFormat("unrecognized container (expected RIFF/WAVE or CAF): " +
                            path.string());
}

void write_pcm_wav(const MultichannelBuffer& buffer, const std::filesystem::path& path) {
    const std::size_t channels = buffer.samples.channels();
    const std::size_t frames = buffer.samples.frames();
    if (channels == 0) throw InvalidArgument("cannot write a zero-channel file");
    const std::uint32_t data_size = static_cast<std::uint32_t>(channels * frames * 4);

    Writer w;
    w.fourcc("RIFF");
    w.u32le(4 + 24 + 12 + 8 + data_size);
    w.fourcc("WAVE");
    w.fourcc("fmt ");
    w.u32le(16);
    w.u16le(kWavFloat);
    w.u16le(static_cast<std::uint16_t>(channels));
    w.u32le(static_cast<std::uint32_t>(buffer.sample_rate));
    w.u32le(static_cast<std::uint32_t>(buffer.sample_rate) *
            static_cast<std::uint32_t>(channels) * 4);
    w.u16le(static_cast<std::uint16_t>(channels * 4));
    w.u16le(32);
    w.fourcc("fact");
    w.u32le(4);
    w.u32le(static_cast<std::uint32_t>(frames));
    w.fourcc("data");
    w.u32le(data_size);
    for (std::size_t i = 0; i < frames; ++i)
        for (std::size_t ch = 0; ch < channels; ++ch)
            w.f32le(static_cast<float>(buffer.samples.at(ch, i)));
    w.save(path);
}

void write_pcm_caf(const MultichannelBuffer& buffer, const std::filesystem::path& path) {
    const std::size_t channels = buffer.samples.channels();
    const std::size_t frames = buffer.samples.frames();
    if (channels == 0) throw InvalidArgument("cannot write a zero-channel file");

    Writer w;
    w.fourcc("caff");
    w.u16be(1);  // version
    w.u16be(0);  // flags
    w.fourcc("desc");
    w.i64be(32);
    w.f64be(buffer.sample_rate);
    w.fourcc("lpcm");
    w.u32be(1u | 2u);  // float, little-endian
    w.u32be(static_cast<std::uint32_t>(channels * 4));  // bytes per packet
    w.u32be(1);                                         // frames per packet
    w.u32be(static_cast<std::uint32_t>(channels));
    w.u32be(32);
    w.fourcc("data");
    w.i64be(static_cast<std::int64_t>(4 + channels * frames * 4));
    w.u32be(0);  // edit count
    for (std::size_t i = 0; i < frames; ++i)
        for (std::size_t ch = 0; ch < channels; ++ch)
            w.f32le(static_cast<float>(buffer.samples.at(ch, i)));
    w.save(path);
}

const char* to_string(Container container) {
    switch (container) {
        case Container::WAV: return "wav";
        case Container::CAF: return "caf";
        case Container::AMB: return "amb";
    }
    return "?";
}

Container container_from_extension(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".wav") return Container::WAV;
    if (ext == ".caf") return Container::CAF;
    if (ext == ".amb") return Container::AMB;
    throw UnsupportedFormat("unknown audio extension '" + ext + "' for " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& audio_path) {
    std::filesystem::path p = audio_path;
    p.replace_extension(".meta.json");
    return p;
}

namespace {

ChannelOrdering ordering_from_name(const std::string& name) {
    if (name == "acn") return ChannelOrdering::ACN;
    if (name == "fuma") return ChannelOrdering::FuMa;
    throw ParseError("unknown ordering '" + name + "' (expected acn|fuma)");
}

Normalization normalization_from_name(const std::string& name) {
    if (name == "sn3d") return Normalization::SN3D;
    if (name == "n3d") return Normalization::N3D;
    if (name == "fuma") return Normalization::FuMa;
    throw ParseError("unknown normalization '" + name + "' (expected sn3d|n3d|fuma)");
}

std::optional<FormatMeta> read_sidecar(const std::filesystem::path& audio_path) {
    const std::filesystem::path meta = sidecar_path(audio_path);
    std::ifstream in(meta);
    if (!in) return std::nullopt;
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("sidecar " + meta.string() + ": " + e.what());
    }
    FormatMeta out;
    out.container = Container::WAV;
    out.order = j.at("order").get<int>();
    out.convention.ordering = ordering_from_name(j.at("ordering").get<std::string>());
    out.convention.normalization =
        normalization_from_name(j.at("normalization").get<std::string>());
    return out;
}

void write_sidecar(const std::filesystem::path& audio_path, const Convention& convention,
                   int order) {
    json j;
    j["order"] = order;
    j["ordering"] = to_string(convention.ordering);
    j["normalization"] = to_string(convention.normalization);
    std::ofstream out(sidecar_path(audio_path), std::ios::trunc);
    if (!out) throw IoError("cannot write sidecar for " + audio_path.string());
    out << j.dump(2) << "\n";
}

int order_from_channels(std::size_t channels) {
    const int order = static_cast<int>(std::lround(std::sqrt(static_cast<double>(channels)))) - 1;
    if (order < 0 || static_cast<std::size_t>(channel_count(order)) != channels)
        throw MalformedSignal("channel count " + std::to_string(channels) +
                              " is not (N+1)^2");
    return order;
}

}  // namespace

AmbisonicBuffer read_audio(const std::filesystem::path& path,
                           const std::optional<FormatMeta>& hint) {
    const Container container = container_from_extension(path);
    MultichannelBuffer pcm = read_pcm(path);
    const int order = order_from_channels(pcm.samples.channels());

    Convention convention;
    if (hint.has_value()) {
        convention = hint->convention;
        if (hint->order >= 0 && hint->order != order)
            throw MalformedSignal("hint order " + std::to_string(hint->order) +
                                  " does not match channel count " +
                                  std::to_string(pcm.samples.channels()));
    } else if (container == Container::AMB) {
        convention = Convention::fuma();
    } else if (container == Container::CAF) {
        convention = Convention::canonical();
    } else {
        const std::optional<FormatMeta> sidecar = read_sidecar(path);
        if (!sidecar.has_value())
            throw InvalidArgument("plain .wav carries no ambisonic metadata: " +
                                  path.string() +
                                  " (pass a convention or provide a sidecar)");
        convention = sidecar->convention;
        if (sidecar->order != order)
            throw MalformedSignal("sidecar order " + std::to_string(sidecar->order) +
                                  " does not match channel count " +
                                  std::to_string(pcm.samples.channels()));
    }

    AmbisonicBuffer out(pcm.sample_rate, order, convention, pcm.samples.frames());
    out.samples() = std::move(pcm.samples);
    return out;
}

void write_audio(const AmbisonicBuffer& buffer, const std::filesystem::path& path,
                 const FormatMeta& target) {
    if (target.container == Container::AMB && buffer.order() > 3)
        throw UnsupportedFormat("the .amb format is limited to 3rd order, got order " +
                                std::to_string(buffer.order()));
    if (target.container == Container::AMB && target.convention != Convention::fuma())
        throw UnsupportedFormat(".amb files are always fuma/fuma");
    if (target.container == Container::CAF && target.convention != Convention::canonical())
        throw UnsupportedFormat(".caf files are always acn/sn3d");

    const AmbisonicBuffer converted = convert_convention(buffer, target.convention);
    MultichannelBuffer pcm;
    pcm.sample_rate = converted.sample_rate();
    pcm.samples = converted.samples();

    if (target.container == Container::CAF) {
        write_pcm_caf(pcm, path);
    } else {
        write_pcm_wav(pcm, path);
        if (target.container == Container::WAV)
            write_sidecar(path, target.convention, converted.order());
    }
}

FormatMeta meta_from_extension(const std::filesystem::path& path, int order) {
    FormatMeta meta;
    meta.container = container_from_extension(path);
    meta.order = order;
    switch (meta.container) {
        case Container::WAV:
        case Container::CAF:
            meta.convention = Convention::canonical();
            break;
        case Container::AMB:
            meta.convention = Convention::fuma();
            break;
    }
    return meta;
}

}  // namespace ambra
