#pragma once

#include "frame4/error.hpp"
#include "frame4/linalg.hpp"
#include "frame4/stencil.hpp"
#include "frame4/curve.hpp"
#include "frame4/pattern.hpp"
#include "frame4/frame.hpp"
#include "frame4/constructors.hpp"
#include "frame4/gallery.hpp"
#include "frame4/io.hpp"
