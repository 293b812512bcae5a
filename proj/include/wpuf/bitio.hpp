#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpuf/bitvec.hpp"

namespace wpuf {

enum class BitFormat { Ascii, Raw };

/// Write sequences for external test suites. Ascii is one '0'/'1' line per
/// sequence; Raw concatenates MSB-first packed bytes. Round-trips bit-exactly
/// through the import functions below.
inline void export_bits(const std::vector<BitVec>& seqs, const std::filesystem::path& path,
                        BitFormat format) {
    if (seqs.empty()) throw std::invalid_argument("export_bits: no sequences");
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("export_bits: cannot open " + tmp);
        if (format == BitFormat::Ascii) {
            for (const auto& s : seqs) out << s.to_string() << '\n';
        } else {
            for (const auto& s : seqs) {
                if (s.size() % 8 != 0)
                    throw std::invalid_argument("export_bits: raw format needs multiple-of-8 lengths");
                const auto bytes = s.to_bytes();
                out.write(reinterpret_cast<const char*>(bytes.data()),
                          static_cast<std::streamsize>(bytes.size()));
            }
        }
        if (!out) throw std::runtime_error("export_bits: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline std::vector<BitVec> import_ascii(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("import_ascii: cannot open " + path.string());
    std::vector<BitVec> seqs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        seqs.push_back(BitVec::from_string(line));
    }
    return seqs;
}

inline std::vector<BitVec> import_raw(const std::filesystem::path& path, std::size_t bits_per_seq) {
    if (bits_per_seq == 0 || bits_per_seq % 8 != 0)
        throw std::invalid_argument("import_raw: bits per sequence must be a positive multiple of 8");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("import_raw: cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    const std::size_t per = bits_per_seq / 8;
    std::vector<BitVec> seqs;
    for (std::size_t off = 0; off + per <= bytes.size(); off += per) {
        std::vector<std::uint8_t> chunk(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                                        bytes.begin() + static_cast<std::ptrdiff_t>(off + per));
        seqs.push_back(BitVec::from_bytes(chunk, bits_per_seq));
    }
    return seqs;
}

}  // namespace wpuf
