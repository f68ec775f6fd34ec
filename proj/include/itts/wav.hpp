#ifndef ITTS_WAV_HPP
#define ITTS_WAV_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace itts {

// RIFF/WAVE, PCM 16-bit signed little-endian, mono. Samples are clamped to
// [-1, 1] here and nowhere earlier.
std::vector<uint8_t> encode_wav_pcm16(std::span<const double> samples,
                                      int sample_rate);

void write_wav_pcm16(const std::string& path, std::span<const double> samples,
                     int sample_rate);

}  // namespace itts

#endif  // ITTS_WAV_HPP
