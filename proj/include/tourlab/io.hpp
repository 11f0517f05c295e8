#pragma once

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tourlab/tournament.hpp"

namespace tourlab {

struct MalformedInput : std::runtime_error {
    explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

// TRN1: line 1 is n in decimal, then n rows of n characters from {0,1};
// row i column j is 1 iff arc i -> j. Diagonal zero, exactly one direction per pair.
inline std::string write_trn1(const Tournament& t) {
    std::ostringstream out;
    int n = t.size();
    out << n << "\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out << (i != j && t.arc(i, j) ? '1' : '0');
        out << "\n";
    }
    return out.str();
}

inline Tournament read_trn1(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw MalformedInput("TRN1: missing header line");
    int n;
    try {
        size_t used = 0;
        n = std::stoi(line, &used);
        while (used < line.size() && std::isspace((unsigned char)line[used])) ++used;
        if (used != line.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw MalformedInput("TRN1: bad vertex count '" + line + "'");
    }
    if (n < 0) throw MalformedInput("TRN1: negative vertex count");
    Tournament t(n);
    std::vector<std::string> rows(n);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, rows[i])) throw MalformedInput("TRN1: missing row " + std::to_string(i));
        if (!rows[i].empty() && rows[i].back() == '\r') rows[i].pop_back();
        if ((int)rows[i].size() != n)
            throw MalformedInput("TRN1: row " + std::to_string(i) + " has wrong length");
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            char c = rows[i][j];
            if (c != '0' && c != '1') throw MalformedInput("TRN1: invalid character in matrix");
            if (i == j && c != '0') throw MalformedInput("TRN1: nonzero diagonal");
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool ij = rows[i][j] == '1', ji = rows[j][i] == '1';
            if (ij == ji) throw MalformedInput("TRN1: antisymmetry violated at pair (" +
                                               std::to_string(i) + "," + std::to_string(j) + ")");
            if (ij)
                t.set_arc(i, j);
            else
                t.set_arc(j, i);
        }
    return t;
}

// UT1: header "UT1 n=<n> ", then the upper triangle row-major (bit 1 means
// lower-index -> higher-index), packed 4 bits per hex digit, zero padded.
inline std::string write_ut1(const Tournament& t) {
    int n = t.size();
    std::string out = "UT1 n=" + std::to_string(n) + " ";
    int nibble = 0, filled = 0;
    auto flush = [&]() {
        out += "0123456789abcdef"[nibble];
        nibble = 0;
        filled = 0;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            nibble = (nibble << 1) | (t.arc(i, j) ? 1 : 0);
            if (++filled == 4) flush();
        }
    if (filled > 0) {
        nibble <<= (4 - filled);
        flush();
    }
    return out;
}

inline Tournament read_ut1(const std::string& text) {
    const std::string prefix = "UT1 n=";
    if (text.rfind(prefix, 0) != 0) throw MalformedInput("UT1: bad header");
    size_t pos = prefix.size();
    size_t sp = text.find(' ', pos);
    if (sp == std::string::npos) throw MalformedInput("UT1: missing bit field");
    int n;
    try {
        n = std::stoi(text.substr(pos, sp - pos));
    } catch (const std::exception&) {
        throw MalformedInput("UT1: bad vertex count");
    }
    if (n < 0) throw MalformedInput("UT1: negative vertex count");
    std::string hex = text.substr(sp + 1);
    while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r' || hex.back() == ' ')) hex.pop_back();
    int bits = n * (n - 1) / 2;
    int want = (bits + 3) / 4;
    if ((int)hex.size() != want) throw MalformedInput("UT1: wrong digit count");
    std::vector<char> bit(bits);
    for (int b = 0; b < bits; ++b) {
        char c = hex[b / 4];
        int v;
        if (c >= '0' && c <= '9')
            v = c - '0';
        else if (c >= 'a' && c <= 'f')
            v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            v = c - 'A' + 10;
        else
            throw MalformedInput("UT1: invalid hex digit");
        bit[b] = (v >> (3 - b % 4)) & 1;
    }
    // Padding bits must be zero.
    for (int b = bits; b < want * 4; ++b) {
        char c = hex[b / 4];
        int v = (c >= 'a') ? c - 'a' + 10 : (c >= 'A') ? c - 'A' + 10 : c - '0';
        if ((v >> (3 - b % 4)) & 1) throw MalformedInput("UT1: nonzero padding");
    }
    Tournament t(n);
    int b = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (bit[b++])
                t.set_arc(i, j);
            else
                t.set_arc(j, i);
        }
    return t;
}

} // namespace tourlab
