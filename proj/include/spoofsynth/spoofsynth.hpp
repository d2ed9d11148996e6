#pragma once

#include "spoofsynth/camera.hpp"
#include "spoofsynth/composite.hpp"
#include "spoofsynth/config.hpp"
#include "spoofsynth/deform.hpp"
#include "spoofsynth/error.hpp"
#include "spoofsynth/evalkit.hpp"
#include "spoofsynth/geometry.hpp"
#include "spoofsynth/image.hpp"
#include "spoofsynth/mesher.hpp"
#include "spoofsynth/pipeline.hpp"
#include "spoofsynth/png_io.hpp"
#include "spoofsynth/raster.hpp"
