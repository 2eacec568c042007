#ifndef LAMEBANDS_LAMEBANDS_HPP
#define LAMEBANDS_LAMEBANDS_HPP

// Umbrella header; including it is the supported way to consume the library
// (the catalog and SUSY layers complete each other's dispatch).

#include "lamebands/jet.hpp"
#include "lamebands/elliptic.hpp"
#include "lamebands/potential.hpp"
#include "lamebands/catalog.hpp"
#include "lamebands/ince.hpp"
#include "lamebands/susy.hpp"
#include "lamebands/evaluate.hpp"
#include "lamebands/floquet.hpp"
#include "lamebands/relations.hpp"

#endif
