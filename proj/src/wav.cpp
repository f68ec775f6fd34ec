#include "itts/wav.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "itts/errors.hpp"

namespace itts {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

void put_tag(std::vector<uint8_t>& out, const char tag[4]) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

std::vector<uint8_t> encode_wav_pcm16(std::span<const double> samples,
                                      int sample_rate) {
  const uint16_t channels = 1;
  const uint16_t bits = 16;
  const uint32_t byte_rate = static_cast<uint32_t>(sample_rate) * channels * bits / 8;
  const uint16_t block_align = channels * bits / 8;
  const uint32_t data_size = static_cast<uint32_t>(samples.size()) * block_align;

  std::vector<uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, channels);
  put_u32(out, static_cast<uint32_t>(sample_rate));
  put_u32(out, byte_rate);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double x : samples) {
    const double clamped = std::clamp(x, -1.0, 1.0);
    const auto v = static_cast<int16_t>(std::lround(clamped * 32767.0));
    put_u16(out, static_cast<uint16_t>(v));
  }
  return out;
}

void write_wav_pcm16(const std::string& path, std::span<const double> samples,
                     int sample_rate) {
  std::vector<uint8_t> bytes = encode_wav_pcm16(samples, sample_rate);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open for writing: " + path);
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw DomainError("short write: " + path);
}

}  // namespace itts
