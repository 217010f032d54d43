#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dihedral/census.hpp"
#include "dihedral/errors.hpp"
#include "dihedral/multiplicity.hpp"
#include "dihedral/realquad.hpp"
#include "dihedral/residues.hpp"

namespace py = pybind11;
using namespace dihedral;

namespace {

// Python ints cross the boundary as decimal strings.
Integer to_integer(const py::handle& n)
{
    if (!PyLong_Check(n.ptr())) throw InvalidInput("expected an int");
    return Integer(py::reinterpret_steal<py::str>(PyObject_Str(n.ptr())).cast<std::string>());
}

py::int_ to_py(const Integer& n)
{
    PyObject* obj = PyLong_FromString(n.get_str().c_str(), nullptr, 10);
    if (!obj) throw py::error_already_set();
    return py::reinterpret_steal<py::int_>(obj);
}

py::tuple form_tuple(const Form& f) { return py::make_tuple(to_py(f.a), to_py(f.b), to_py(f.c)); }
py::tuple quad_tuple(const QuadInt& a) { return py::make_tuple(to_py(a.x), to_py(a.y)); }

py::list space_rows(const RingSpace& v) { return py::cast(v.basis()); }

py::dict report_dict(const CensusReport& r)
{
    py::module_ json = py::module_::import("json");
    return json.attr("loads")(to_json(r));
}

CensusOptions options(unsigned workers) { return CensusOptions{.workers = workers}; }

} // namespace

PYBIND11_MODULE(_dihedral, m)
{
    m.doc() = "Multiplicities of dihedral fields of degree 2p over quadratic fields";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    auto unsupported = py::register_exception<Unsupported>(m, "Unsupported", PyExc_RuntimeError);
    py::register_exception<SearchExhausted>(m, "SearchExhausted", unsupported.ptr());
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_AssertionError);

    m.def("is_fundamental", [](const py::int_& d) { return is_fundamental(to_integer(d)); });
    m.def("kronecker", [](const py::int_& d, const py::int_& q) { return kronecker(to_integer(d), to_integer(q)); });

    m.def("class_group", [](const py::int_& d) {
        ClassGroup g = class_group(to_integer(d));
        py::list gens;
        for (const Form& f : g.generators) gens.append(form_tuple(f));
        py::dict out;
        out["h"] = g.h;
        out["divisors"] = g.divisors;
        out["generators"] = gens;
        return out;
    });
    m.def("p_rank", [](const py::int_& d, int p) { return p_rank(to_integer(d), p); });
    m.def("ring_class_rank", [](const py::int_& d, const py::int_& c, int p) { return ring_class_rank(to_integer(d), to_integer(c), p); });
    m.def("selmer_generator", [](const py::int_& d, int p, const py::tuple& f, const py::int_& r) {
        Form form{to_integer(f[0]), to_integer(f[1]), to_integer(f[2])};
        return quad_tuple(selmer_generator(to_integer(d), p, form, to_integer(r)));
    });

    m.def("fundamental_unit", [](const py::int_& d) {
        UnitData u = fundamental_unit(to_integer(d));
        return py::make_tuple(to_py(u.eta.x), to_py(u.eta.y), u.norm);
    });
    m.def("real_class_number", [](const py::int_& d) { return to_py(real_class_number(to_integer(d))); });
    m.def("unit_index", [](const py::int_& d, const py::int_& c) { return to_py(unit_index(to_integer(d), to_integer(c))); });
    m.def("rqc_defect", [](const py::int_& d, const py::int_& q, int p) { return rqc_defect(to_integer(d), to_integer(q), p); });

    m.def("selmer_basis", [](const py::int_& d, int p) {
        SelmerBasis b = selmer_basis(to_integer(d), p);
        py::list gens;
        for (const SelmerGenerator& g : b.generators) {
            py::dict e;
            e["alpha"] = quad_tuple(g.alpha);
            e["form"] = g.form ? py::object(form_tuple(*g.form)) : py::none();
            e["r"] = to_py(g.r);
            gens.append(e);
        }
        py::dict out;
        out["class_rank"] = b.class_rank;
        out["sigma"] = b.sigma;
        out["generators"] = gens;
        return out;
    });
    m.def("ring_space", [](const py::int_& d, int p, const py::int_& c) { return space_rows(ring_space(selmer_basis(to_integer(d), p), to_integer(c))); });
    m.def("defect", [](const py::int_& d, int p, const py::int_& c) { return defect(selmer_basis(to_integer(d), p), to_integer(c)); });

    m.def("multiplicity", [](const py::int_& d, int p, const py::int_& c) {
        MultiplicityBreakdown b = multiplicity(to_integer(d), p, to_integer(c));
        py::dict out;
        out["m"] = to_py(b.m);
        out["U"] = to_py(b.U);
        out["F"] = to_py(b.F);
        out["R"] = py::make_tuple(to_py(b.R.get_num()), to_py(b.R.get_den()));
        out["rho"] = b.rho;
        out["omega"] = b.omega;
        out["tau"] = b.tau;
        out["u"] = b.u;
        out["v"] = b.v;
        out["delta"] = b.delta;
        out["occupations"] = b.occupations;
        out["admissible"] = b.admissible;
        out["irregular"] = b.irregular;
        out["formula"] = b.formula;
        return out;
    });
    m.def("general_multiplicity", [](const py::int_& d, int p, const py::int_& c) { return to_py(general_multiplicity(to_integer(d), p, to_integer(c))); });
    m.def("restrictive_factor", [](int p, int v, std::vector<int> occ) {
        Rational r = restrictive_factor(p, v, std::move(occ));
        return py::make_tuple(to_py(r.get_num()), to_py(r.get_den()));
    });
    m.def("dihedral_discriminant", [](const py::int_& d, int p, const py::int_& c) {
        DihedralDiscriminant dd = dihedral_discriminant(to_integer(d), p, to_integer(c));
        return py::make_tuple(to_py(dd.d_N), to_py(dd.d_L));
    });

    m.def("rank_frequencies", [](int p, const py::int_& lo, const py::int_& hi, unsigned workers) {
        Integer a = to_integer(lo), b = to_integer(hi);
        CensusReport r;
        {
            py::gil_scoped_release release;
            r = rank_frequencies(p, a, b, options(workers));
        }
        return report_dict(r);
    }, py::arg("p"), py::arg("d_min"), py::arg("d_max"), py::arg("workers") = 1);
    m.def("minimal_discriminant", [](int p, int rho, int sign, const py::int_& bound) {
        MinimalDiscriminant md = minimal_discriminant(p, rho, sign, to_integer(bound));
        return py::make_tuple(to_py(md.d), to_py(md.m));
    }, py::arg("p"), py::arg("rho"), py::arg("sign") = -1, py::arg("bound") = 10000000);
    m.def("multiplet_census", [](int p, const py::int_& bound, unsigned workers) {
        Integer b = to_integer(bound);
        CensusReport r;
        {
            py::gil_scoped_release release;
            r = multiplet_census(p, b, options(workers));
        }
        return report_dict(r);
    }, py::arg("p"), py::arg("bound"), py::arg("workers") = 1);
    m.def("first_free_conductor", [](int p, const py::int_& c, const std::string& constraint, int rho, const py::int_& bound) {
        FreeConductorRow row = first_free_conductor(p, to_integer(c), Constraint::parse(constraint), rho, to_integer(bound));
        return report_dict(first_free_report({row}));
    }, py::arg("p"), py::arg("c"), py::arg("constraint") = "", py::arg("rho") = 1, py::arg("bound") = 1000000);
    m.def("irregular_survey", [](const std::vector<py::int_>& ds) {
        std::vector<Integer> xs;
        for (const auto& d : ds) xs.push_back(to_integer(d));
        return report_dict(irregular_report(irregular_survey(xs)));
    });
}
