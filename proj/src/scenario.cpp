// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/scenario.hpp"
#include "metafourier/grid_io.hpp"
#include "metafourier/metasurface.hpp"
#include "metafourier/oracle.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace metafourier
{
    namespace
    {
        namespace pt = boost::property_tree;

        // -----------------------------------------------------------------------------------------
        // Config parsing helpers

        const std::map<std::string, std::set<std::string>> &schema()
        {
            static const std::set<std::string> grid_keys{"n", "nx", "ny", "spacing", "dx", "dy", "half_width", "center"};
            static const std::map<std::string, std::set<std::string>> s{
                {"scenario", {"name", "topology", "wavelength", "distance", "distance1", "distance2", "backend", "enforce_validity"}},
                {"geometry", {"tx_a", "tx_b", "tx_n", "ris_a", "ris_b", "ris_n", "rx_a", "rx_b", "rx_n", "axis", "axis1", "axis2"}},
                {"signal", {"shape", "size", "centers", "weights"}},
                {"grid_source", grid_keys},
                {"grid_tx", grid_keys},
                {"grid_ris", grid_keys},
                {"grid_rx", grid_keys},
                {"grid_image", grid_keys},
                {"analysis", {"gamma", "gamma1", "gamma2", "blob_analysis", "blob_window"}},
                {"output", {"directory", "export_profiles", "wrap_phase"}},
                {"tolerances", {}}};
            return s;
        }

        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            const auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        }

        struct Section
        {
            std::string name;
            const pt::ptree *tree = nullptr;

            std::optional<std::string> get(const std::string &key) const
            {
                if (!tree)
                    return std::nullopt;
                for (const auto &[k, v] : *tree)
                    if (k == key)
                        return trim(v.data());
                return std::nullopt;
            }

            [[noreturn]] void fail(const std::string &key, const std::string &what) const
            {
                throw Error(ErrorCode::schema, fmt::format("[{}] {}: {}", name, key, what));
            }

            double to_double(const std::string &key, const std::string &text) const
            {
                double v = 0.0;
                const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc() || ptr != text.data() + text.size())
                    fail(key, fmt::format("'{}' is not a number", text));
                return v;
            }

            std::optional<double> number(const std::string &key) const
            {
                const auto t = get(key);
                if (!t)
                    return std::nullopt;
                return to_double(key, *t);
            }

            std::vector<double> numbers(const std::string &key, const std::string &text) const
            {
                std::string spaced = text;
                std::replace(spaced.begin(), spaced.end(), ',', ' ');
                std::stringstream ss(spaced);
                std::vector<double> v;
                for (std::string tok; ss >> tok;)
                    v.push_back(to_double(key, tok));
                return v;
            }

            std::optional<std::vector<double>> list(const std::string &key, std::size_t count) const
            {
                const auto t = get(key);
                if (!t)
                    return std::nullopt;
                auto v = numbers(key, *t);
                if (v.size() != count)
                    fail(key, fmt::format("expected {} numbers, got {}", count, v.size()));
                return v;
            }

            std::optional<Vector3> vector3(const std::string &key) const
            {
                const auto v = list(key, 3);
                if (!v)
                    return std::nullopt;
                return Vector3((*v)[0], (*v)[1], (*v)[2]);
            }

            std::optional<std::size_t> count(const std::string &key) const
            {
                const auto t = get(key);
                if (!t)
                    return std::nullopt;
                std::size_t v = 0;
                const auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
                if (ec != std::errc() || ptr != t->data() + t->size())
                    fail(key, fmt::format("'{}' is not a non-negative integer", *t));
                return v;
            }

            std::optional<bool> flag(const std::string &key) const
            {
                const auto t = get(key);
                if (!t)
                    return std::nullopt;
                if (*t == "true" || *t == "yes" || *t == "1")
                    return true;
                if (*t == "false" || *t == "no" || *t == "0")
                    return false;
                fail(key, fmt::format("'{}' is not a boolean", *t));
            }

            template <typename T>
            T require(const std::optional<T> &value, const std::string &key) const
            {
                if (!value)
                    fail(key, "required entry is missing");
                return *value;
            }
        };

        Section section(const pt::ptree &root, const std::string &name)
        {
            const auto it = root.find(name);
            return Section{name, it == root.not_found() ? nullptr : &it->second};
        }

        // Grid from n/nx/ny plus spacing/dx/dy or half_width, optional center
        std::optional<GridSpec> parse_grid(const Section &s)
        {
            if (!s.tree)
                return std::nullopt;
            const auto n = s.count("n");
            const auto nx = s.count("nx") ? s.count("nx") : n;
            const auto ny = s.count("ny") ? s.count("ny") : n;
            if (!nx || !ny)
                s.fail("n", "grid needs 'n' or both 'nx' and 'ny'");

            const auto half = s.number("half_width");
            const auto spacing = s.number("spacing");
            auto dx = s.number("dx") ? s.number("dx") : spacing;
            auto dy = s.number("dy") ? s.number("dy") : spacing;
            if (half)
            {
                if (dx || dy)
                    s.fail("half_width", "give either 'half_width' or a spacing, not both");
                dx = 2.0 * *half / static_cast<double>(*nx);
                dy = 2.0 * *half / static_cast<double>(*ny);
            }
            if (!dx || !dy)
                s.fail("spacing", "grid needs 'spacing', 'dx'/'dy' or 'half_width'");

            const auto center = s.list("center", 2).value_or(std::vector<double>{0.0, 0.0});
            return GridSpec{*nx, *ny, *dx, *dy, center[0], center[1]};
        }

        SignalSpec parse_signal(const Section &s)
        {
            const std::string shape = s.require(s.get("shape"), "shape");
            const auto size = s.require(s.list("size", 2), "size");

            std::vector<std::vector<double>> centers;
            if (const auto text = s.get("centers"))
            {
                std::stringstream ss(*text);
                for (std::string item; std::getline(ss, item, ';');)
                {
                    const auto c = s.numbers("centers", item);
                    if (c.size() != 2)
                        s.fail("centers", "each center needs two coordinates ('x y; x y; ...')");
                    centers.push_back(c);
                }
            }
            if (centers.empty())
                centers.push_back({0.0, 0.0});

            std::vector<double> weights(centers.size(), 1.0);
            if (const auto text = s.get("weights"))
            {
                weights = s.numbers("weights", *text);
                if (weights.size() != centers.size())
                    s.fail("weights", fmt::format("expected {} weights (one per center), got {}", centers.size(), weights.size()));
            }

            auto leaf = [&](const std::vector<double> &c) -> SignalSpec
            {
                if (shape == "rect")
                    return SignalSpec{RectSignal{size[0], size[1], c[0], c[1]}};
                if (shape == "gaussian")
                    return SignalSpec{GaussianSignal{size[0], size[1], c[0], c[1]}};
                s.fail("shape", fmt::format("unknown shape '{}' (rect or gaussian)", shape));
            };

            if (centers.size() == 1 && weights[0] == 1.0)
                return leaf(centers[0]);
            std::vector<WeightedSignal> terms;
            for (std::size_t n = 0; n < centers.size(); ++n)
                terms.push_back(WeightedSignal{weights[n], leaf(centers[n])});
            return SignalSpec{std::move(terms)};
        }

        // Raw frame from the config; validated later so that validate() can report it
        SurfaceFrame parse_frame(const Section &g, const std::string &prefix)
        {
            SurfaceFrame f;
            f.axis_a = g.vector3(prefix + "_a").value_or(Vector3::UnitX());
            f.axis_b = g.vector3(prefix + "_b").value_or(Vector3::UnitY());
            f.normal = g.vector3(prefix + "_n").value_or(f.axis_a.cross(f.axis_b));
            return f;
        }

        // -----------------------------------------------------------------------------------------
        // Pipeline helpers

        struct Link
        {
            SurfaceFrame tx, ris, rx;
            PropagationSpec leg1, leg2;
            ShearMatrix t1, t2;
        };

        std::vector<std::string> required_grids(LinkTopology t)
        {
            switch (t)
            {
            case LinkTopology::two_aligned:
                return {"tx", "rx"};
            case LinkTopology::two_unaligned:
                return {"source", "tx", "rx"};
            case LinkTopology::three_aligned:
                return {"tx", "ris", "rx"};
            case LinkTopology::three_unaligned:
                return {"source", "tx", "ris", "rx", "image"};
            }
            return {};
        }

        bool is_unaligned(LinkTopology t)
        {
            return t == LinkTopology::two_unaligned || t == LinkTopology::three_unaligned;
        }

        // Places the frames along the link axes and derives both legs
        Link build_link(const ScenarioConfig &c)
        {
            require_unit(c.axis1, "axis1");
            Link link;
            link.tx = c.tx;
            link.tx.origin = Vector3::Zero();
            link.tx.validate();

            const bool three = is_three_surface(c.topology);
            SurfaceFrame &next = three ? link.ris : link.rx;
            next = three ? c.ris : c.rx;
            next.origin = link.tx.origin + c.distance1 * c.axis1;
            next.validate();
            link.leg1 = PropagationSpec::between(link.tx, next, c.wavelength, c.backend);
            link.leg1.enforce_validity = c.enforce_validity;
            link.t1 = shear_matrix(link.leg1.cosines);

            if (three)
            {
                require_unit(c.axis2, "axis2");
                link.rx = c.rx;
                link.rx.origin = link.ris.origin + c.distance2 * c.axis2;
                link.rx.validate();
                link.leg2 = PropagationSpec::between(link.ris, link.rx, c.wavelength, c.backend);
                link.leg2.enforce_validity = c.enforce_validity;
                link.t2 = shear_matrix(link.leg2.cosines);
            }
            return link;
        }

        bool all_leaves_gaussian(const SignalSpec &s)
        {
            return std::visit(
                [](const auto &v) -> bool
                {
                    using S = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<S, GaussianSignal>)
                        return true;
                    else if constexpr (std::is_same_v<S, RectSignal>)
                        return false;
                    else
                        return std::all_of(v.begin(), v.end(), [](const WeightedSignal &w)
                                           { return all_leaves_gaussian(w.signal); });
                },
                s.shape);
        }

        class Stopwatch
        {
        public:
            explicit Stopwatch(std::vector<std::pair<std::string, double>> &sink) : sink_(sink) {}
            void lap(const std::string &stage)
            {
                const auto now = std::chrono::steady_clock::now();
                sink_.emplace_back(stage, std::chrono::duration<double>(now - last_).count());
                last_ = now;
            }

        private:
            std::vector<std::pair<std::string, double>> &sink_;
            std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
        };

        void record_grid(RunSummary &s, const std::string &stem, const GridSpec &g)
        {
            s.values["grid." + stem + ".nx"] = static_cast<double>(g.nx);
            s.values["grid." + stem + ".ny"] = static_cast<double>(g.ny);
            s.values["grid." + stem + ".dx"] = g.dx;
            s.values["grid." + stem + ".dy"] = g.dy;
            s.values["grid." + stem + ".cx"] = g.cx;
            s.values["grid." + stem + ".cy"] = g.cy;
        }

        void record_moments(RunSummary &s, const std::string &key, const PowerMoments &m)
        {
            s.values[key + ".cx"] = m.cx;
            s.values[key + ".cy"] = m.cy;
            s.values[key + ".sx"] = m.sx;
            s.values[key + ".sy"] = m.sy;
        }

        // Moments of each quadrant about the grid center, optionally windowed around the quadrant peak
        void record_blobs(RunSummary &s, const std::string &stem, const ComplexField &f, double window)
        {
            const GridSpec &g = f.grid;
            const double big = 1e300;
            const std::array<std::array<double, 4>, 4> quadrants{{{g.cx, big, g.cy, big},
                                                                   {-big, g.cx, g.cy, big},
                                                                   {-big, g.cx, -big, g.cy},
                                                                   {g.cx, big, -big, g.cy}}};
            for (std::size_t q = 0; q < 4; ++q)
            {
                auto [x0, x1, y0, y1] = quadrants[q];
                if (window > 0.0)
                {
                    // Peak node of the quadrant
                    double best = -1.0, px = 0.0, py = 0.0;
                    for (std::size_t j = 0; j < g.ny; ++j)
                        for (std::size_t i = 0; i < g.nx; ++i)
                        {
                            const double x = g.x(i), y = g.y(j);
                            if (x >= x0 && x <= x1 && y >= y0 && y <= y1 && std::norm(f.at(i, j)) > best)
                                best = std::norm(f.at(i, j)), px = x, py = y;
                        }
                    x0 = std::max(x0, px - window), x1 = std::min(x1, px + window);
                    y0 = std::max(y0, py - window), y1 = std::min(y1, py + window);
                }
                const PowerMoments m = power_moments(f, x0, x1, y0, y1);
                const std::string key = fmt::format("blobs.{}.q{}", stem, q + 1);
                record_moments(s, key, m);
                s.values[key + ".power"] = m.power;
            }
        }

        // First minimum of |f|^2 on each side of the peak, along the row and column through it
        void record_nulls(RunSummary &s, const std::string &stem, const ComplexField &f)
        {
            const GridSpec &g = f.grid;
            std::size_t pi = 0, pj = 0;
            double best = -1.0;
            for (std::size_t j = 0; j < g.ny; ++j)
                for (std::size_t i = 0; i < g.nx; ++i)
                    if (std::norm(f.at(i, j)) > best)
                        best = std::norm(f.at(i, j)), pi = i, pj = j;

            auto walk = [&](std::size_t start, std::size_t n, int step, auto &&value) -> std::size_t
            {
                std::size_t k = start;
                while (true)
                {
                    const std::ptrdiff_t next = static_cast<std::ptrdiff_t>(k) + step;
                    if (next < 0 || next >= static_cast<std::ptrdiff_t>(n) || value(static_cast<std::size_t>(next)) > value(k))
                        return k;
                    k = static_cast<std::size_t>(next);
                }
            };
            auto row = [&](std::size_t i)
            { return std::norm(f.at(i, pj)); };
            auto col = [&](std::size_t j)
            { return std::norm(f.at(pi, j)); };
            s.values["nulls." + stem + ".x_neg"] = g.x(walk(pi, g.nx, -1, row));
            s.values["nulls." + stem + ".x_pos"] = g.x(walk(pi, g.nx, 1, row));
            s.values["nulls." + stem + ".y_neg"] = g.y(walk(pj, g.ny, -1, col));
            s.values["nulls." + stem + ".y_pos"] = g.y(walk(pj, g.ny, 1, col));
        }

        std::string format_value(double v)
        {
            return fmt::format("{:.17g}", v);
        }
    }

    // ---------------------------------------------------------------------------------------------
    // Tolerance

    bool Tolerance::accepts(double value) const
    {
        if (!std::isfinite(value))
            return false;
        switch (kind)
        {
        case Kind::within:
            return std::abs(value - expected) <= tolerance;
        case Kind::below:
            return value < expected;
        case Kind::above:
            return value > expected;
        }
        return false;
    }

    std::string Tolerance::describe() const
    {
        switch (kind)
        {
        case Kind::within:
            return fmt::format("{} +- {}", expected, tolerance);
        case Kind::below:
            return fmt::format("< {}", expected);
        case Kind::above:
            return fmt::format("> {}", expected);
        }
        return {};
    }

    Tolerance Tolerance::parse(const std::string &text)
    {
        const std::string t = trim(text);
        Section s{"tolerances", nullptr};
        Tolerance tol;
        if (!t.empty() && (t[0] == '<' || t[0] == '>'))
        {
            tol.kind = t[0] == '<' ? Kind::below : Kind::above;
            const auto v = s.numbers(t, t.substr(1));
            if (v.size() != 1)
                throw Error(ErrorCode::schema, fmt::format("[tolerances] '{}': expected '< bound' or '> bound'", t));
            tol.expected = v[0];
            return tol;
        }
        const auto v = s.numbers(t, t);
        if (v.size() != 2 || !(v[1] >= 0.0))
            throw Error(ErrorCode::schema, fmt::format("[tolerances] '{}': expected 'value tolerance'", t));
        tol.expected = v[0];
        tol.tolerance = v[1];
        return tol;
    }

    double RunSummary::at(const std::string &key) const
    {
        const auto it = values.find(key);
        if (it == values.end())
            throw Error(ErrorCode::schema, fmt::format("summary has no entry '{}'", key));
        return it->second;
    }

    std::string stage_file_stem(const std::string &stage)
    {
        // A prime marks the normalized (unsheared) stage: S'1 -> S1p
        std::string stem, primes;
        for (char ch : stage)
            if (ch == '\'')
                primes += 'p';
            else
                stem += ch;
        return stem + primes;
    }

    // ---------------------------------------------------------------------------------------------
    // Config

    ScenarioConfig parse_config(std::istream &is, const std::string &origin)
    {
        pt::ptree root;
        try
        {
            pt::read_ini(is, root);
        }
        catch (const pt::ini_parser_error &e)
        {
            throw Error(ErrorCode::schema, fmt::format("{}: line {}: {}", origin, e.line(), e.message()));
        }

        // Reject unknown sections and keys so that typos do not silently fall back to defaults
        for (const auto &[name, tree] : root)
        {
            const auto it = schema().find(name);
            if (it == schema().end())
                throw Error(ErrorCode::schema, fmt::format("{}: unknown section [{}]", origin, name));
            if (name == "tolerances")
                continue;
            for (const auto &[key, value] : tree)
                if (!it->second.count(key))
                    throw Error(ErrorCode::schema, fmt::format("{}: unknown key '{}' in [{}]", origin, key, name));
        }

        ScenarioConfig c;
        const Section sc = section(root, "scenario");
        if (!sc.tree)
            throw Error(ErrorCode::schema, fmt::format("{}: missing [scenario] section", origin));
        c.name = sc.get("name").value_or("scenario");
        c.topology = parse_link_topology(sc.require(sc.get("topology"), "topology"));
        c.wavelength = sc.require(sc.number("wavelength"), "wavelength");
        if (is_three_surface(c.topology))
        {
            c.distance1 = sc.require(sc.number("distance1"), "distance1");
            c.distance2 = sc.require(sc.number("distance2"), "distance2");
        }
        else
            c.distance1 = sc.require(sc.number("distance") ? sc.number("distance") : sc.number("distance1"), "distance");
        if (const auto b = sc.get("backend"))
            c.backend = parse_backend(*b);
        c.enforce_validity = sc.flag("enforce_validity").value_or(true);

        const Section geo = section(root, "geometry");
        c.tx = parse_frame(geo, "tx");
        c.ris = parse_frame(geo, "ris");
        c.rx = parse_frame(geo, "rx");
        c.axis1 = geo.vector3("axis1").value_or(geo.vector3("axis").value_or(Vector3::UnitZ()));
        c.axis2 = geo.vector3("axis2").value_or(Vector3::UnitZ());

        const Section sig = section(root, "signal");
        if (!sig.tree)
            throw Error(ErrorCode::schema, fmt::format("{}: missing [signal] section", origin));
        c.signal = parse_signal(sig);

        for (const std::string name : {"source", "tx", "ris", "rx", "image"})
            if (const auto g = parse_grid(section(root, "grid_" + name)))
                c.grids[name] = *g;

        const Section an = section(root, "analysis");
        c.gamma = an.number("gamma");
        c.gamma1 = an.number("gamma1");
        c.gamma2 = an.number("gamma2");
        c.blob_analysis = an.flag("blob_analysis").value_or(false);
        c.blob_window = an.number("blob_window").value_or(0.0);

        const Section out = section(root, "output");
        c.output_directory = out.get("directory").value_or(".");
        c.export_profiles = out.flag("export_profiles").value_or(true);
        c.wrap_phase = out.flag("wrap_phase").value_or(false);

        const Section tol = section(root, "tolerances");
        if (tol.tree)
            for (const auto &[key, value] : *tol.tree)
                c.tolerances.emplace_back(key, Tolerance::parse(value.data()));
        return c;
    }

    ScenarioConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream is(path);
        if (!is)
            throw Error(ErrorCode::io, fmt::format("cannot open scenario '{}'", path.string()));
        return parse_config(is, path.string());
    }

    // ---------------------------------------------------------------------------------------------
    // Validation

    std::vector<Diagnostic> validate(const ScenarioConfig &c)
    {
        std::vector<Diagnostic> d;
        auto guard = [&](auto &&fn)
        {
            try
            {
                fn();
                return true;
            }
            catch (const Error &e)
            {
                d.push_back({e.code(), e.what()});
                return false;
            }
        };

        if (!(c.wavelength > 0.0) || !std::isfinite(c.wavelength))
            d.push_back({ErrorCode::schema, fmt::format("schema: wavelength must be positive (got {})", c.wavelength)});
        if (!(c.distance1 > 0.0) || !std::isfinite(c.distance1))
            d.push_back({ErrorCode::schema, fmt::format("schema: distance must be positive (got {})", c.distance1)});
        if (is_three_surface(c.topology) && (!(c.distance2 > 0.0) || !std::isfinite(c.distance2)))
            d.push_back({ErrorCode::schema, fmt::format("schema: distance2 must be positive (got {})", c.distance2)});

        bool grids_ok = true;
        for (const auto &name : required_grids(c.topology))
        {
            const auto it = c.grids.find(name);
            if (it == c.grids.end())
            {
                d.push_back({ErrorCode::schema, fmt::format("schema: topology {} requires [grid_{}]", to_string(c.topology), name)});
                grids_ok = false;
            }
            else
                grids_ok &= guard([&]
                                  { it->second.validate(); });
        }

        const bool signal_ok = guard([&]
                                     { c.signal.validate(); });
        if (!d.empty())
            return d;

        Link link;
        if (!guard([&]
                   { link = build_link(c); }))
            return d;

        const bool three = is_three_surface(c.topology);
        const bool unaligned = is_unaligned(c.topology);
        if (!unaligned)
        {
            if (!link.leg1.cosines.is_aligned() || (three && !link.leg2.cosines.is_aligned()))
                d.push_back({ErrorCode::validation,
                             fmt::format("validation: topology {} requires aligned frames and axes", to_string(c.topology))});
        }
        for (const auto *t : {&link.t1, three ? &link.t2 : nullptr})
            if (t && t->degenerate)
                d.push_back({ErrorCode::conditioning,
                             fmt::format("conditioning: shear determinant {:.3e} < {:.0e}", t->det, degenerate_det_threshold)});
        if (!d.empty() || !grids_ok || !signal_ok)
            return d;

        // Resolution of the synthesized signals
        if (unaligned)
        {
            guard([&]
                  { check_resolution(c.signal, c.grids.at("source")); });
            guard([&]
                  { check_resolution(c.signal, c.grids.at("tx"), link.t1.input_shear()); });
        }
        else
            guard([&]
                  { check_resolution(c.signal, c.grids.at("tx")); });

        // Sampling, validity and cost per leg
        auto check_leg = [&](const PropagationSpec &spec, const GridSpec &in, const GridSpec &out, const char *leg)
        {
            try
            {
                check_sampling(in, out, spec.wavelength, spec.distance());
            }
            catch (const Error &e)
            {
                d.push_back({e.code(), fmt::format("{} ({})", e.what(), leg)});
            }
            if (spec.enforce_validity && spec.backend != Backend::exact_kernel)
            {
                try
                {
                    check_fresnel_validity(in, out, spec.distance());
                }
                catch (const Error &e)
                {
                    d.push_back({e.code(), fmt::format("{} ({})", e.what(), leg)});
                }
            }
            if (spec.backend == Backend::exact_kernel && (in.size() > exact_kernel_max_nodes || out.size() > exact_kernel_max_nodes))
                d.push_back({ErrorCode::cost_guard, fmt::format("cost_guard: exact_kernel is limited to {} nodes per grid ({})",
                                                                exact_kernel_max_nodes, leg)});
        };
        if (three)
        {
            check_leg(link.leg1, c.grids.at("tx"), c.grids.at("ris"), "leg 1");
            check_leg(link.leg2, c.grids.at("ris"), c.grids.at("rx"), "leg 2");
        }
        else
            check_leg(link.leg1, c.grids.at("tx"), c.grids.at("rx"), "leg 1");

        for (const auto &[key, tol] : c.tolerances)
            if (key.empty())
                d.push_back({ErrorCode::schema, "schema: empty tolerance key"});
        return d;
    }

    // ---------------------------------------------------------------------------------------------
    // Run

    RunResult run(const ScenarioConfig &c, const RunOptions &options)
    {
        const std::vector<Diagnostic> diagnostics = validate(c);
        if (!diagnostics.empty())
        {
            std::string message = diagnostics.front().message;
            for (std::size_t n = 1; n < diagnostics.size(); ++n)
                message += "; " + diagnostics[n].message;
            throw Error(diagnostics.front().code, message);
        }

        RunResult result;
        RunSummary &s = result.summary;
        Stopwatch clock(s.timings);
        s.labels["name"] = c.name;
        s.labels["topology"] = std::string(to_string(c.topology));
        s.labels["backend"] = std::string(to_string(c.backend));

        const Link link = build_link(c);
        const bool three = is_three_surface(c.topology);
        const bool unaligned = is_unaligned(c.topology);
        const double k = link.leg1.wavenumber(), lambda = c.wavelength;
        const double r1 = c.distance1, r2 = c.distance2;
        const GridSpec &tx_grid = c.grids.at("tx");
        const GridSpec &rx_grid = c.grids.at("rx");

        std::vector<ComplexField> stages;
        auto keep = [&](ComplexField f, const char *stage) -> const ComplexField &
        {
            f.stage = stage;
            stages.push_back(std::move(f));
            return stages.back();
        };

        // Source signals
        const double det1 = link.t1.det;
        if (unaligned)
        {
            keep(synthesize(c.signal, c.grids.at("source")), "S'1");
            keep(synthesize_mapped(c.signal, tx_grid, link.t1.input_shear(), std::sqrt(det1)), "S1");
        }
        else
            keep(synthesize(c.signal, tx_grid), "S1");
        const ComplexField s1 = stages.back();
        clock.lap("synthesize");

        // Leg 1: transmit mask, field propagation, receive conversion
        const GridSpec &leg1_out = three ? c.grids.at("ris") : rx_grid;
        const PhaseProfile theta_tx = phase_two_surface(SurfaceRole::tx, link.leg1.cosines, k, r1, tx_grid);
        const PhaseProfile theta_leg1_rx = phase_two_surface(SurfaceRole::rx, link.leg1.cosines, k, r1, leg1_out);
        const ComplexField f1 = apply_phase(s1, theta_tx);
        const ComplexField f2 = propagate_field(f1, link.leg1, leg1_out, "F2");
        const ComplexField s2 = keep(apply_phase(f2, theta_leg1_rx), "S2");
        clock.lap("leg1");

        // Oracle of the first transform: S2 = (a_rz a_rw / sqrt(‖T1‖)) FT[S'1]
        const double obl1 = link.leg1.obliquity();
        const ComplexField s2_oracle = oracle::sample(leg1_out, [&](double u, double v)
                                                      { return obl1 / std::sqrt(det1) * oracle::signal_ft(c.signal, lambda, r1, u, v); });
        s.values["oracle.l2rel.S2"] = relative_l2(s2, s2_oracle);

        std::vector<PhaseProfile> profiles{theta_tx};
        if (three)
        {
            const GridSpec &ris_grid = c.grids.at("ris");
            const double det2 = link.t2.det, obl2 = link.leg2.obliquity();
            const PhaseProfile theta_ris = phase_ris(link.leg1.cosines, link.leg2.cosines, k, r1, r2, ris_grid);
            const PhaseProfile theta_rx = phase_two_surface(SurfaceRole::rx, link.leg2.cosines, k, r2, rx_grid);
            const ComplexField g2 = apply_phase(f2, theta_ris);
            const ComplexField g3 = propagate_field(g2, link.leg2, rx_grid, "G3");
            const ComplexField s3 = keep(apply_phase(g3, theta_rx), "S3");
            profiles.push_back(theta_ris);
            profiles.push_back(theta_rx);
            clock.lap("leg2");

            // S3(u) = (obl1 obl2 / sqrt(‖T1‖)) DFT[S'1](T2 u)
            const Matrix2 b2 = link.t2.output_shear();
            const double scale3 = obl1 * obl2 / std::sqrt(det1);
            const ComplexField s3_oracle = oracle::sample(rx_grid, [&](double u, double v)
                                                          {
                                                              const Vector2 w = b2 * Vector2(u, v);
                                                              return scale3 * oracle::signal_double_ft(c.signal, lambda, r1, r2, w.x(), w.y()); });
            s.values["oracle.l2rel.S3"] = relative_l2(s3, s3_oracle);

            if (unaligned)
            {
                const GridSpec &image_grid = c.grids.at("image");
                const ComplexField s3p = keep(resample_affine(s3, b2, 1.0 / std::sqrt(det2), image_grid), "S'3");
                const double scale3p = scale3 / std::sqrt(det2);
                const ComplexField s3p_oracle = oracle::sample(image_grid, [&](double u, double v)
                                                               { return scale3p * oracle::signal_double_ft(c.signal, lambda, r1, r2, u, v); });
                s.values["oracle.l2rel.S3p"] = relative_l2(s3p, s3p_oracle);
                clock.lap("shear_back");
            }
            s.values["det.T1"] = det1;
            s.values["det.T2"] = det2;
            s.values["obliquity.leg1"] = obl1;
            s.values["obliquity.leg2"] = obl2;
            s.values["fresnel_ratio.leg1"] = fresnel_ratio(tx_grid, ris_grid, r1);
            s.values["fresnel_ratio.leg2"] = fresnel_ratio(ris_grid, rx_grid, r2);
        }
        else
        {
            profiles.push_back(theta_leg1_rx);
            s.values["det.T"] = det1;
            s.values["obliquity.leg1"] = obl1;
            s.values["fresnel_ratio.leg1"] = fresnel_ratio(tx_grid, rx_grid, r1);
        }

        // Powers, ratios and predictions
        std::map<std::string, double> power;
        for (const auto &f : stages)
            power[f.stage] = total_power(f);
        for (const auto &[stage, p] : power)
            s.values["power." + stage_file_stem(stage)] = p;
        s.values["ratio.measured.S2"] = power.at("S2") / power.at("S1");
        const PowerRatios predicted = predicted_power_ratio(c.topology, det1, three ? link.t2.det : 1.0);
        s.values["ratio.predicted.S2"] = predicted.stage2;
        if (three)
        {
            s.values["ratio.measured.S3"] = power.at("S3") / power.at("S1");
            s.values["ratio.predicted.S3"] = *predicted.stage3;
        }

        // Mode count from the aperture areas
        ModeCountSpec modes;
        modes.wavelength = lambda;
        modes.m_tx = tx_grid.area();
        modes.m_rx = rx_grid.area();
        modes.gamma = c.gamma;
        modes.gamma1 = c.gamma1;
        modes.gamma2 = c.gamma2;
        ModeTopology mode_topology = ModeTopology::two_aligned;
        if (three)
        {
            modes.m_ris = c.grids.at("ris").area();
            modes.distance1 = r1;
            modes.distance2 = r2;
            modes.det1 = det1;
            modes.det2 = link.t2.det;
            const bool gauss = all_leaves_gaussian(c.signal);
            if (unaligned)
                mode_topology = gauss ? ModeTopology::three_gauss_unaligned : ModeTopology::three_rect_unaligned;
            else
                mode_topology = gauss ? ModeTopology::three_gauss : ModeTopology::three_rect;
        }
        else
        {
            modes.distance = r1;
            modes.det = det1;
            mode_topology = unaligned ? ModeTopology::two_unaligned : ModeTopology::two_aligned;
        }
        s.values["modes.N"] = mode_count(modes, mode_topology);
        s.labels["modes.topology"] = std::string(to_string(mode_topology));

        // Moments, blobs, nulls and grid metadata per stage
        const bool single_rect = std::holds_alternative<RectSignal>(c.signal.shape);
        for (const auto &f : stages)
        {
            const std::string stem = stage_file_stem(f.stage);
            record_grid(s, stem, f.grid);
            record_moments(s, "moments." + stem, power_moments(f));
            if (c.blob_analysis)
                record_blobs(s, stem, f, c.blob_window);
        }
        if (single_rect)
            record_nulls(s, "S2", s2);
        clock.lap("analysis");

        for (const auto &[key, tol] : c.tolerances)
        {
            const auto it = s.values.find(key);
            if (it == s.values.end())
                s.violations.push_back(fmt::format("{}: not produced by this scenario (expected {})", key, tol.describe()));
            else if (!tol.accepts(it->second))
                s.violations.push_back(fmt::format("{} = {:.6g} violates {}", key, it->second, tol.describe()));
        }

        if (options.write_files)
        {
            const std::filesystem::path dir = c.output_directory;
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec)
                throw Error(ErrorCode::io, fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
            for (const auto &f : stages)
            {
                const auto path = dir / (stage_file_stem(f.stage) + ".csv");
                write_grid_csv(path, f);
                s.files.push_back(path);
            }
            if (c.export_profiles)
            {
                const std::vector<std::string> names = three ? std::vector<std::string>{"theta_tx", "theta_ris", "theta_rx"}
                                                             : std::vector<std::string>{"theta_tx", "theta_rx"};
                for (std::size_t n = 0; n < profiles.size(); ++n)
                {
                    const auto path = dir / (names[n] + ".csv");
                    write_profile_csv(path, profiles[n], c.wrap_phase);
                    s.files.push_back(path);
                }
            }
            clock.lap("export");

            write_summary(dir / "summary.txt", s);
            std::ofstream timing(dir / "timing.txt");
            for (const auto &[stage, seconds] : s.timings)
                timing << stage << '=' << fmt::format("{:.6f}", seconds) << '\n';
            if (!timing)
                throw Error(ErrorCode::io, fmt::format("cannot write '{}'", (dir / "timing.txt").string()));
            s.files.push_back(dir / "summary.txt");
            s.files.push_back(dir / "timing.txt");
        }

        if (options.keep_fields)
            for (auto &f : stages)
                result.fields.emplace(f.stage, std::move(f));
        return result;
    }

    std::map<std::string, double> oracle_diff(const ScenarioConfig &config)
    {
        const RunResult r = run(config, RunOptions{false, false});
        std::map<std::string, double> out;
        for (const auto &[key, value] : r.summary.values)
            if (key.rfind("oracle.", 0) == 0)
                out[key] = value;
        return out;
    }

    void write_summary(std::ostream &os, const RunSummary &s)
    {
        for (const auto &[key, value] : s.labels)
            os << "label." << key << '=' << value << '\n';
        for (const auto &[key, value] : s.values)
            os << key << '=' << format_value(value) << '\n';
        os << "tolerance.violations=" << s.violations.size() << '\n';
    }

    void write_summary(const std::filesystem::path &path, const RunSummary &s)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw Error(ErrorCode::io, fmt::format("cannot open '{}' for writing", path.string()));
        write_summary(os, s);
        if (!os)
            throw Error(ErrorCode::io, fmt::format("write to '{}' failed", path.string()));
    }

    std::map<std::string, double> read_summary(const std::filesystem::path &path)
    {
        std::ifstream is(path);
        if (!is)
            throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path.string()));
        std::map<std::string, double> out;
        std::size_t number = 0;
        for (std::string line; std::getline(is, line);)
        {
            ++number;
            if (line.empty() || line.rfind("label.", 0) == 0)
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::io, fmt::format("{}: line {}: expected key=value", path.string(), number));
            const std::string value = line.substr(eq + 1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || ptr != value.data() + value.size())
                throw Error(ErrorCode::io, fmt::format("{}: line {}: '{}' is not a number", path.string(), number, value));
            out[line.substr(0, eq)] = v;
        }
        return out;
    }
}
