// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/error.hpp"
#include "metafourier/grid_io.hpp"
#include "metafourier/metasurface.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

using namespace metafourier;

namespace
{
    std::string io_message(const std::string &text)
    {
        std::istringstream is(text);
        try
        {
            read_grid_csv(is);
        }
        catch (const Error &e)
        {
            EXPECT_EQ(e.code(), ErrorCode::io);
            return e.what();
        }
        ADD_FAILURE() << "expected an io error";
        return {};
    }
}

TEST(GridIo, RoundTripIsExact)
{
    ComplexField f = synthesize(SignalSpec::gaussian(0.05, 0.07, 0.01, -0.02), GridSpec{7, 5, 0.006, 0.004, 0.1, -0.3}, "S'1");
    f.samples[3] *= Complex(0.3, -1.7);
    std::stringstream ss;
    write_grid_csv(ss, f);
    const ComplexField g = read_grid_csv(ss);
    EXPECT_TRUE(g.grid.matches(f.grid));
    EXPECT_EQ(g.grid.dx, f.grid.dx);
    EXPECT_EQ(g.stage, "S'1");
    EXPECT_EQ(g.samples, f.samples);
}

TEST(GridIo, HeaderAndColumns)
{
    const ComplexField f(GridSpec{2, 2, 0.5, 0.5, 0.0, 0.0}, std::vector<Complex>{{1, 0}, {0, 1}, {2, 0}, {0, -2}}, "S2");
    std::stringstream ss;
    write_grid_csv(ss, f);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "# nx=2, ny=2, dx=0.5, dy=0.5, cx=0, cy=0, stage=S2");
    std::getline(ss, line);
    EXPECT_EQ(line, "x,y,re,im");
    std::getline(ss, line);
    EXPECT_EQ(line, "-0.25,-0.25,1,0");
    std::getline(ss, line);
    EXPECT_EQ(line, "0.25,-0.25,0,1");
}

TEST(GridIo, ErrorsNameTheLine)
{
    const std::string header = "# nx=2, ny=2, dx=0.5, dy=0.5, cx=0, cy=0, stage=S2\nx,y,re,im\n";
    EXPECT_NE(io_message("x,y,re,im\n").find("line 1"), std::string::npos);
    EXPECT_NE(io_message("# nx=2, ny=2, dx=0.5\nx,y,re,im\n").find("lacks 'dy'"), std::string::npos);
    EXPECT_NE(io_message(header + "0,0,1,0\n0,0,abc,0\n").find("line 4"), std::string::npos);
    EXPECT_NE(io_message(header + "0,0,1,0\n").find("line 4"), std::string::npos);
    EXPECT_NE(io_message(header + "0,0,1\n").find("line 3"), std::string::npos);
}

TEST(GridIo, ProfileExport)
{
    const GridSpec g{3, 2, 0.5, 1.0, 0.0, 0.5};
    const PhaseProfile p = phase_ris(DirectionCosines::aligned(), DirectionCosines::aligned(), 2 * std::numbers::pi / 0.01, 10.0, 5.0, g);
    std::stringstream raw, wrapped;
    write_profile_csv(raw, p, false);
    write_profile_csv(wrapped, p, true);
    std::string line;
    std::getline(raw, line);
    EXPECT_NE(line.find("stage=ris_aligned"), std::string::npos);
    std::getline(raw, line);
    EXPECT_EQ(line, "x,y,theta");
    for (int n = 0; n < 2; ++n)
        std::getline(raw, line), std::getline(wrapped, line);
    std::getline(raw, line);
    EXPECT_EQ(line.substr(0, 6), "0.5,0,");
    EXPECT_NEAR(std::stod(line.substr(6)), 23.5619449, 1e-7);
    std::getline(wrapped, line);
    std::getline(wrapped, line);
    std::getline(wrapped, line);
    EXPECT_NEAR(std::stod(line.substr(6)), wrap_phase(23.5619449019), 1e-7);
}
