// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/grid_io.hpp"
#include "metafourier/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace metafourier
{
    namespace
    {
        std::string header(const GridSpec &g, const std::string &stage)
        {
            return fmt::format("# nx={}, ny={}, dx={:.17g}, dy={:.17g}, cx={:.17g}, cy={:.17g}, stage={}\n", g.nx, g.ny,
                               g.dx, g.dy, g.cx, g.cy, stage);
        }

        std::string trim(std::string s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        }

        double parse_double(const std::string &text, std::size_t line, const char *what)
        {
            const std::string t = trim(text);
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
            if (ec != std::errc() || ptr != t.data() + t.size())
                throw Error(ErrorCode::io, fmt::format("line {}: cannot parse {} '{}'", line, what, t));
            return value;
        }

        std::size_t parse_count(const std::string &text, std::size_t line, const char *what)
        {
            const std::string t = trim(text);
            std::size_t value = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
            if (ec != std::errc() || ptr != t.data() + t.size())
                throw Error(ErrorCode::io, fmt::format("line {}: cannot parse {} '{}'", line, what, t));
            return value;
        }

        template <typename Fn>
        void write_file(const std::filesystem::path &path, Fn &&fn)
        {
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw Error(ErrorCode::io, fmt::format("cannot open '{}' for writing", path.string()));
            fn(os);
            os.flush();
            if (!os)
                throw Error(ErrorCode::io, fmt::format("write to '{}' failed", path.string()));
        }
    }

    void write_grid_csv(std::ostream &os, const ComplexField &f)
    {
        f.validate();
        const GridSpec &g = f.grid;
        fmt::memory_buffer buf;
        fmt::format_to(std::back_inserter(buf), "{}x,y,re,im\n", header(g, f.stage));
        for (std::size_t j = 0; j < g.ny; ++j)
            for (std::size_t i = 0; i < g.nx; ++i)
            {
                const Complex s = f.at(i, j);
                fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{:.17g},{:.17g}\n", g.x(i), g.y(j), s.real(),
                               s.imag());
            }
        os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }

    void write_grid_csv(const std::filesystem::path &path, const ComplexField &f)
    {
        write_file(path, [&](std::ostream &os)
                   { write_grid_csv(os, f); });
    }

    ComplexField read_grid_csv(std::istream &is)
    {
        std::string line;
        std::size_t number = 1;
        if (!std::getline(is, line) || line.rfind("#", 0) != 0)
            throw Error(ErrorCode::io, "line 1: missing '# nx=..., ...' header");

        // Header: comma separated key=value pairs after '#'
        std::map<std::string, std::string> meta;
        std::stringstream hs(line.substr(1));
        for (std::string item; std::getline(hs, item, ',');)
        {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::io, fmt::format("line 1: malformed header entry '{}'", trim(item)));
            meta[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
        }
        for (const char *key : {"nx", "ny", "dx", "dy", "cx", "cy"})
            if (!meta.count(key))
                throw Error(ErrorCode::io, fmt::format("line 1: header lacks '{}'", key));

        GridSpec g{parse_count(meta["nx"], 1, "nx"), parse_count(meta["ny"], 1, "ny"), parse_double(meta["dx"], 1, "dx"),
                   parse_double(meta["dy"], 1, "dy"), parse_double(meta["cx"], 1, "cx"), parse_double(meta["cy"], 1, "cy")};
        try
        {
            g.validate();
        }
        catch (const Error &e)
        {
            throw Error(ErrorCode::io, fmt::format("line 1: invalid grid ({})", e.what()));
        }

        ++number;
        if (!std::getline(is, line) || trim(line) != "x,y,re,im")
            throw Error(ErrorCode::io, fmt::format("line {}: expected column line 'x,y,re,im'", number));

        ComplexField f(g, meta.count("stage") ? meta["stage"] : std::string());
        for (std::size_t n = 0; n < g.size(); ++n)
        {
            ++number;
            if (!std::getline(is, line))
                throw Error(ErrorCode::io, fmt::format("line {}: unexpected end of file ({} of {} rows)", number, n, g.size()));
            std::stringstream rs(line);
            std::string cols[4];
            for (int c = 0; c < 4; ++c)
                if (!std::getline(rs, cols[c], ','))
                    throw Error(ErrorCode::io, fmt::format("line {}: expected 4 columns", number));
            f.samples[n] = Complex(parse_double(cols[2], number, "re"), parse_double(cols[3], number, "im"));
        }
        return f;
    }

    ComplexField read_grid_csv(const std::filesystem::path &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path.string()));
        return read_grid_csv(is);
    }

    void write_profile_csv(std::ostream &os, const PhaseProfile &p, bool wrap)
    {
        const GridSpec &g = p.grid;
        fmt::memory_buffer buf;
        fmt::format_to(std::back_inserter(buf), "{}x,y,theta\n", header(g, std::string(to_string(p.recipe))));
        for (std::size_t j = 0; j < g.ny; ++j)
            for (std::size_t i = 0; i < g.nx; ++i)
            {
                const double theta = wrap ? wrap_phase(p.at(i, j)) : p.at(i, j);
                fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{:.17g}\n", g.x(i), g.y(j), theta);
            }
        os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }

    void write_profile_csv(const std::filesystem::path &path, const PhaseProfile &p, bool wrap)
    {
        write_file(path, [&](std::ostream &os)
                   { write_profile_csv(os, p, wrap); });
    }
}
