#pragma once

// Command-line driver. Exit codes: 0 success, 2 admissibility failure (the
// requested frame does not exist or cannot be resolved), 1 usage / IO error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frame4/constructors.hpp"
#include "frame4/curve.hpp"
#include "frame4/error.hpp"
#include "frame4/frame.hpp"
#include "frame4/gallery.hpp"
#include "frame4/io.hpp"
#include "frame4/pattern.hpp"

namespace frame4::cli {

inline int default_grid_density() {
    if (const char* env = std::getenv("FRAME4_GRID_N")) {
        try {
            const int v = std::stoi(env);
            if (v >= 16) return v;
        } catch (const std::exception&) {
        }
        throw Error(ErrorKind::InvalidArgument, "FRAME4_GRID_N must be an integer >= 16");
    }
    return kDefaultGridDensity;
}

struct Options {
    std::string preset;
    std::string input;
    std::string frame_file;
    std::string coeffs_file;
    std::string type;
    std::string from, to;
    std::string expect;
    std::string output;
    std::string format = "csv";
    std::string gallery_name;
    std::vector<double> constant;
    int grid_n = 0;
    double tol = tol::pattern;
    double length = 4.0;
    int eps = 1, kappa = 1, sign1 = 1, sign3 = 1;
};

namespace detail {

struct LoadedCurve {
    CurvePath curve;
    std::optional<Preset> preset;
    std::string label;
};

inline LoadedCurve load_curve(const Options& o, int density) {
    if (o.preset.empty() == o.input.empty()) throw Error(ErrorKind::InvalidArgument, "give exactly one of --preset or --input");
    LoadedCurve lc;
    if (!o.preset.empty()) {
        lc.preset = get_preset(o.preset);
        lc.curve = sample_curve(*lc.preset, density);
        lc.label = o.preset;
    } else {
        Interval domain;
        const RawCurve raw = io::read_sampled_curve(o.input, &domain);
        lc.curve = arc_length_reparametrize(raw, domain, std::max(16, samples_for(domain, density)));
        lc.label = o.input;
    }
    return lc;
}

inline void check_sign(int v, const char* name) {
    if (v != 1 && v != -1) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be +1 or -1");
}

inline io::Metadata metadata(const Options& o, const std::string& label, const std::string& kind, int density) {
    return {{"source", label},
            {"kind", kind},
            {"grid_density", std::to_string(density)},
            {"tol", io::fmt(o.tol)},
            {"eps", std::to_string(o.eps)},
            {"kappa", std::to_string(o.kappa)},
            {"sign1", std::to_string(o.sign1)},
            {"sign3", std::to_string(o.sign3)}};
}

inline std::string output_path(const Options& o, const std::string& suffix) {
    return o.output + "_" + suffix + io::extension(io::parse_format(o.format));
}

inline void print_verify(std::ostream& out, const VerifyReport& r) {
    out << "verify:\n";
    out << "  expected: " << type_letter(r.expected) << "\n";
    out << "  tolerance: " << io::fmt(r.tolerance) << "\n";
    out << "  orthogonality_defect: " << io::fmt(r.orthogonality_defect) << "\n";
    if (r.tangent_defect) out << "  tangent_defect: " << io::fmt(*r.tangent_defect) << "\n";
    for (FrameType t : kAllFrameTypes)
        out << "  residual_" << type_letter(t) << ": " << io::fmt(r.best_residual[static_cast<std::size_t>(t)]) << "\n";
    out << "  degenerate: " << (r.degenerate ? "true" : "false") << "\n";
    out << "  passed: " << (r.passed ? "true" : "false") << "\n";
}

inline void print_classify(std::ostream& out, const ClassifyResult& r, double tolerance) {
    out << "classify: tolerance " << io::fmt(tolerance) << ", max entry " << io::fmt(r.max_entry)
        << (r.degenerate ? ", degenerate (all patterns match)" : "") << "\n";
    out << "mask_id,type,permutation,residual,match\n";
    for (const auto& m : r.table)
        out << m.mask_id << ',' << type_letter(PatternCatalog::instance().type_of(m.mask_id)) << ',' << m.permutation.str()
            << ',' << io::fmt(m.residual) << ',' << (m.residual <= tolerance ? "yes" : "no") << "\n";
    out << "types:";
    for (FrameType t : r.types()) out << ' ' << type_letter(t);
    out << "\n";
}

inline void write_outputs(const Options& o, const FramePath* frame, const CoefficientPath* coeffs, const CurvePath* curve,
                          const io::Metadata& meta, std::ostream& out) {
    if (o.output.empty()) return;
    const auto f = io::parse_format(o.format);
    if (curve) {
        const auto p = output_path(o, "curve");
        io::write_table(p, io::curve_table(*curve), f, meta);
        out << "wrote " << p << "\n";
    }
    if (frame) {
        const auto p = output_path(o, "frame");
        io::write_table(p, io::frame_table(*frame), f, meta);
        out << "wrote " << p << "\n";
    }
    if (coeffs) {
        const auto p = output_path(o, "coeffs");
        io::write_table(p, io::coefficient_table(*coeffs), f, meta);
        out << "wrote " << p << "\n";
    }
}

struct Built {
    FramePath frame;
    CoefficientPath coeffs;
    std::string method;
};

/// Type C frame of a loaded curve: avoided-direction pipeline first; when b
/// vanishes somewhere, the hyperplane construction or (for coefficient
/// presets) the angle-plan sweep.
inline Built build_type_c(const LoadedCurve& lc, const Options& o, int density, std::ostream& out) {
    try {
        auto p = type_c_via_avoided_direction(lc.curve, o.sign1, o.sign3);
        out << "type C: avoided direction margin " << io::fmt(p.direction.margin) << "\n";
        return {p.result.frame, p.result.coeffs, "avoided direction"};
    } catch (const Error& e) {
        if (!is_admissibility_failure(e.kind())) throw;
        out << "type C: pointwise construction failed (" << e.what() << ")\n";
        auto cert = certify_hyperplane_type_c(lc.curve, o.tol);
        if (cert.in_hyperplane) {
            out << "type C: curve lies in a hyperplane (max offset " << io::fmt(cert.max_offset) << ")\n";
            if (!cert.certified) throw Error(ErrorKind::PatternMismatch, "hyperplane frame does not fit a type C pattern");
            return {cert.frame, declare_pattern(extract_coefficients(cert.frame), PatternCatalog::canonical(FrameType::C)),
                    "hyperplane"};
        }
        if (lc.preset && lc.preset->source == PresetSource::Coefficients) {
            const auto sweep = empirical_type_c_sweep(*lc.preset, 4096, density);
            out << "type C: direction sweep best residual " << io::fmt(sweep.best_residual) << ", frame residual "
                << io::fmt(sweep.frame_residual.value_or(-1.0)) << "\n";
            if (!sweep.success)
                throw Error(ErrorKind::AvoidanceFailed, "no swept direction yields a type C frame (evidence only)");
            const auto bc = bishop_curve_from_coefficients(*lc.preset, density);
            const auto c = type_c_from_plan(bc.frame, bc.b, sweep.entries[sweep.best].xi);
            return {c.frame, declare_pattern(extract_coefficients(c.frame), PatternCatalog::canonical(FrameType::C)),
                    "direction sweep"};
        }
        throw;
    }
}

inline int cmd_frame(const Options& o, int density, std::ostream& out) {
    const FrameType type = parse_frame_type(o.type);
    check_sign(o.sign1, "--sign1");
    check_sign(o.sign3, "--sign3");
    const auto lc = load_curve(o, density);
    Built b;
    switch (type) {
        case FrameType::B:
            b.frame = rmf_bishop(lc.curve);
            b.coeffs = bishop_coefficients(lc.curve, b.frame);
            b.method = "rotation minimizing transport";
            break;
        case FrameType::C: b = build_type_c(lc, o, density, out); break;
        case FrameType::D:
            try {
                b.frame = type_d_construct(lc.curve);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::Not2Regular && !lc.curve.breaks.empty()) {
                    try {
                        const auto d = detect_type_d_obstruction(lc.curve, lc.curve.s[lc.curve.breaks.front()]);
                        out << "obstruction: T'/|T'| turns by " << io::fmt(d.angle) << " rad at s = " << io::fmt(d.s_star)
                            << (d.obstruction ? " (no continuous D1)" : "") << "\n";
                    } catch (const Error& inner) {
                        out << "obstruction: " << inner.what() << "\n";
                    }
                }
                throw;
            }
            b.coeffs = declare_pattern(extract_coefficients(b.frame), PatternCatalog::canonical(FrameType::D));
            b.method = "D1 = T'/|T'|, transported D2, D3";
            break;
        case FrameType::F:
            b.frame = frenet_type_f(lc.curve);
            b.coeffs = declare_pattern(extract_coefficients(b.frame), PatternCatalog::canonical(FrameType::F));
            b.method = "Frenet";
            break;
    }
    out << "frame " << type_letter(type) << " of " << lc.label << " (" << b.method << "), " << b.frame.size() << " samples\n";
    const auto report = verify_frame(b.frame, lc.curve, type, o.tol);
    print_verify(out, report);
    write_outputs(o, &b.frame, &b.coeffs, nullptr, metadata(o, lc.label, std::string("frame ") + type_letter(type), density), out);
    if (!report.passed) throw Error(ErrorKind::PatternMismatch, "constructed frame fails verification");
    return 0;
}

inline int cmd_convert(const Options& o, int density, std::ostream& out) {
    const FrameType from = parse_frame_type(o.from), to = parse_frame_type(o.to);
    check_sign(o.eps, "--eps");
    check_sign(o.kappa, "--kappa");
    check_sign(o.sign1, "--sign1");
    check_sign(o.sign3, "--sign3");
    const bool from_file = !o.coeffs_file.empty();
    if (from == FrameType::F && to == FrameType::D) {
        CoefficientPath f;
        FramePath fframe;
        std::optional<LoadedCurve> lc;
        if (from_file) {
            f = io::coefficients_from_table(io::read_table(o.coeffs_file));
        } else {
            lc = load_curve(o, density);
            fframe = frenet_type_f(lc->curve);
            f = declare_pattern(extract_coefficients(fframe), PatternCatalog::canonical(FrameType::F));
        }
        const auto r = type_d_from_f(f, o.eps, o.kappa);
        double inv1 = 0.0, inv2 = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto& fc = f.channels[i];
            const auto& dc = r.d.channels[i];
            inv1 = std::max(inv1, std::abs(dc[0] * dc[0] - fc[0] * fc[0]));
            inv2 = std::max(inv2, std::abs(dc[1] * dc[1] + dc[2] * dc[2] - fc[1] * fc[1]));
        }
        out << "convert F -> D: max |d1^2 - f1^2| = " << io::fmt(inv1) << ", max |d2^2 + d3^2 - f2^2| = " << io::fmt(inv2)
            << "\n";
        if (lc) {
            const auto dframe = apply_transform(r.transform, fframe);
            print_verify(out, verify_frame(dframe, lc->curve, FrameType::D, o.tol));
            write_outputs(o, &dframe, &r.d, nullptr, metadata(o, lc->label, "convert F->D", density), out);
        } else {
            write_outputs(o, nullptr, &r.d, nullptr, metadata(o, o.coeffs_file, "convert F->D", density), out);
        }
        return 0;
    }
    if (from == FrameType::B && to == FrameType::C) {
        FramePath bishop;
        CoefficientPath b;
        std::optional<LoadedCurve> lc;
        if (from_file) {
            b = io::coefficients_from_table(io::read_table(o.coeffs_file));
            if (*b.pattern != 0) throw Error(ErrorKind::PatternMismatch, "expected type B coefficients (pattern_id 0)");
            bishop = integrate_frame(b, Mat4::Identity());
            bishop.declared_type = FrameType::B;
        } else {
            lc = load_curve(o, density);
            bishop = rmf_bishop(lc->curve);
            b = bishop_coefficients(lc->curve, bishop);
        }
        const auto r = type_c_from_bishop(bishop, b, o.sign1, o.sign3);
        out << "convert B -> C: sign1 " << o.sign1 << ", sign3 " << o.sign3 << "\n";
        print_verify(out, verify_frame(r.frame, lc ? &lc->curve : nullptr, FrameType::C, o.tol));
        write_outputs(o, &r.frame, &r.coeffs, nullptr, metadata(o, lc ? lc->label : o.coeffs_file, "convert B->C", density),
                      out);
        return 0;
    }
    throw Error(ErrorKind::InvalidArgument, "supported conversions: --from F --to D, --from B --to C");
}

inline int cmd_classify(const Options& o, std::ostream& out) {
    if (o.frame_file.empty() == o.coeffs_file.empty())
        throw Error(ErrorKind::InvalidArgument, "give exactly one of --frame or --coeffs");
    const CoefficientPath c = o.frame_file.empty() ? io::coefficients_from_table(io::read_table(o.coeffs_file))
                                                   : extract_coefficients(io::frame_from_table(io::read_table(o.frame_file)));
    print_classify(out, classify_pattern(c, o.tol), o.tol);
    return 0;
}

inline int cmd_verify(const Options& o, int density, std::ostream& out) {
    const FrameType expected = parse_frame_type(o.expect);
    FramePath frame = io::frame_from_table(io::read_table(o.frame_file));
    std::optional<LoadedCurve> lc;
    if (!o.preset.empty() || !o.input.empty()) {
        lc = load_curve(o, density);
        if (same_grid(lc->curve.s, frame.s)) frame.breaks = lc->curve.breaks;
        else throw Error(ErrorKind::InvalidArgument, "frame grid differs from the curve grid (check --grid-n)");
    }
    const auto r = verify_frame(frame, lc ? &lc->curve : nullptr, expected, o.tol);
    print_verify(out, r);
    if (!r.passed) throw Error(ErrorKind::PatternMismatch, std::string("frame does not verify as type ") + type_letter(expected));
    return 0;
}

inline int cmd_generate(const Options& o, int density, std::ostream& out) {
    if (o.constant.size() != 6) throw Error(ErrorKind::InvalidArgument, "--constant takes six numbers x01 x02 x03 x12 x13 x23");
    if (!(o.length > 0.0)) throw Error(ErrorKind::InvalidArgument, "--length must be positive");
    std::array<double, 6> u{};
    std::copy(o.constant.begin(), o.constant.end(), u.begin());
    const Skew4 x = Skew4::from_upper(u);
    const Interval domain{0.0, o.length};
    const int n = samples_for(domain, density);
    TangentField field;
    field.tangent = [x](double s) { return Vec4(mat_exp(x, s).row(0).transpose()); };
    field.derivative = [x](double s) { return Vec4((x.matrix() * mat_exp(x, s)).row(0).transpose()); };
    field.second_derivative = [x](double s) { return Vec4((x.matrix() * x.matrix() * mat_exp(x, s)).row(0).transpose()); };
    const CurvePath curve = curve_from_tangent(field, domain, n, Vec4::Zero());
    CoefficientPath c;
    c.s = curve.s;
    c.X.assign(curve.size(), x);
    c.constant = true;
    const FramePath frame = integrate_frame(c, Mat4::Identity());
    const auto cls = classify_pattern(c, o.tol);
    out << "generate exp(sX) on [0, " << io::fmt(o.length) << "], " << curve.size() << " samples\n";
    out << "types:";
    for (FrameType t : cls.types()) out << ' ' << type_letter(t);
    out << (cls.degenerate ? " (degenerate)" : "") << "\n";
    std::optional<int> id;
    for (const auto& m : cls.matches)
        if (m.permutation == Permutation{} && (!id || m.mask_id < *id)) id = m.mask_id;
    if (!id && !cls.matches.empty()) id = cls.matches.front().mask_id;
    if (id) {
        // report in the frame's own pattern when one fits without reordering
        const auto coeffs = declare_pattern(c, *id);
        out << "pattern_id: " << *id << "\n";
        write_outputs(o, &frame, &coeffs, &curve, metadata(o, "constant", "generate", density), out);
    } else {
        out << "pattern_id: none (not a generalized Bishop frame)\n";
        write_outputs(o, &frame, nullptr, &curve, metadata(o, "constant", "generate", density), out);
    }
    return 0;
}

inline int cmd_gallery_list(std::ostream& out) {
    for (const auto& name : preset_names()) {
        const auto p = get_preset(name);
        out << name << ": " << p.description << " on [" << io::fmt(p.domain.lo) << ", " << io::fmt(p.domain.hi) << "];";
        for (const auto& [t, a] : p.expected) out << ' ' << type_letter(t) << '=' << admissibility_name(a);
        out << "\n";
    }
    return 0;
}

inline int cmd_gallery_export(const Options& o, int density, std::ostream& out) {
    if (o.output.empty()) throw Error(ErrorKind::InvalidArgument, "gallery export needs --output");
    const auto p = get_preset(o.gallery_name);
    const auto meta = metadata(o, p.name, "gallery", density);
    if (p.source == PresetSource::Coefficients || p.constant_x) {
        const auto grid = preset_grid(p, density);
        const auto coeffs = preset_coefficients(p, grid);
        const CurvePath curve = sample_curve(p, density);
        write_outputs(o, nullptr, &coeffs, &curve, meta, out);
    } else {
        const CurvePath curve = sample_curve(p, density);
        write_outputs(o, nullptr, nullptr, &curve, meta, out);
    }
    return 0;
}

}  // namespace detail

/// Runs one command; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    Options o;
    CLI::App app{"Generalized Bishop frames of curves in E^4", "frame4"};
    app.require_subcommand(1);

    auto add_curve = [&](CLI::App* c) {
        c->add_option("--preset", o.preset, "gallery preset name");
        c->add_option("--input", o.input, "sampled curve CSV with columns t,x,y,z,w");
    };
    auto add_common = [&](CLI::App* c) {
        c->add_option("--grid-n", o.grid_n, "samples per unit of domain length (default 2048 or $FRAME4_GRID_N)")
            ->check(CLI::Range(16, 1 << 24));
        c->add_option("--tol", o.tol, "pattern tolerance")->check(CLI::PositiveNumber);
        c->add_option("--output", o.output, "output path prefix");
        c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    auto add_signs = [&](CLI::App* c) {
        c->add_option("--eps", o.eps, "sign epsilon (+1/-1)");
        c->add_option("--kappa", o.kappa, "sign kappa (+1/-1)");
        c->add_option("--sign1", o.sign1, "sign of c1 (+1/-1)");
        c->add_option("--sign3", o.sign3, "sign of c3 (+1/-1)");
    };

    auto* frame = app.add_subcommand("frame", "construct a frame of a given type");
    add_curve(frame);
    add_common(frame);
    add_signs(frame);
    frame->add_option("--type", o.type, "B, C, D or F")->required();

    auto* convert = app.add_subcommand("convert", "convert F -> D or B -> C");
    add_curve(convert);
    add_common(convert);
    add_signs(convert);
    convert->add_option("--coeffs", o.coeffs_file, "coefficient CSV/JSON instead of a curve");
    convert->add_option("--from", o.from)->required();
    convert->add_option("--to", o.to)->required();

    auto* classify = app.add_subcommand("classify", "match coefficients against the 16 patterns");
    classify->add_option("--frame", o.frame_file, "frame CSV/JSON");
    classify->add_option("--coeffs", o.coeffs_file, "coefficient CSV/JSON");
    classify->add_option("--tol", o.tol, "pattern tolerance")->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "check a frame file");
    add_curve(verify);
    add_common(verify);
    verify->add_option("--frame", o.frame_file, "frame CSV/JSON")->required();
    verify->add_option("--expect", o.expect, "expected type")->required();

    auto* generate = app.add_subcommand("generate", "frame exp(sX) for a constant X");
    add_common(generate);
    generate->add_option("--constant", o.constant, "x01 x02 x03 x12 x13 x23")->expected(6)->required();
    generate->add_option("--length", o.length, "arc length of the generated curve");

    auto* gallery = app.add_subcommand("gallery", "list or export presets");
    gallery->require_subcommand(1);
    auto* glist = gallery->add_subcommand("list", "list presets");
    auto* gexport = gallery->add_subcommand("export", "export a preset");
    gexport->add_option("name", o.gallery_name, "preset name")->required();
    add_common(gexport);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: InvalidArgument: " << e.what() << "\n";
        return 1;
    }

    try {
        const int density = o.grid_n > 0 ? o.grid_n : default_grid_density();
        if (frame->parsed()) return detail::cmd_frame(o, density, out);
        if (convert->parsed()) return detail::cmd_convert(o, density, out);
        if (classify->parsed()) return detail::cmd_classify(o, out);
        if (verify->parsed()) return detail::cmd_verify(o, density, out);
        if (generate->parsed()) return detail::cmd_generate(o, density, out);
        if (glist->parsed()) return detail::cmd_gallery_list(out);
        if (gexport->parsed()) return detail::cmd_gallery_export(o, density, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_admissibility_failure(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: IoError: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace frame4::cli
