/** Export Grad-CAM saliency rasters for a directory of images.
 *
 * Reads a tfjs layers-model checkpoint, runs Grad-CAM at a chosen
 * layer per image, min-max normalizes the map, and writes one 16-bit
 * gray PNG per image at the image's resolution, plus a manifest CSV
 * the evaluation harness can ingest. Per-image failures are logged and
 * skipped. */

import * as tf from '@tensorflow/tfjs'
import { mkdirSync, readdirSync } from 'fs'
import { basename, join, resolve } from 'path'
import { parseArgs } from 'util'

import { camToUint16, gradCam } from './gradcam'
import {
  ManifestRow,
  loadModelFromDir,
  readImageTensor,
  writeGray16,
  writeManifest,
} from './io'

export interface SaliencyExportOptions {
  modelDir: string
  imageDir: string
  outDir: string
  layer: string
  annotationsPath?: string
  classIndex?: number
}

export async function exportSaliency(opts: SaliencyExportOptions): Promise<ManifestRow[]> {
  const model = await loadModelFromDir(opts.modelDir)
  const shape = model.inputs[0].shape
  const [inH, inW] = [shape[1] as number, shape[2] as number]
  mkdirSync(opts.outDir, { recursive: true })

  const names = readdirSync(opts.imageDir)
    .filter(n => n.toLowerCase().endsWith('.png'))
    .sort()
  const rows: ManifestRow[] = []
  for (const name of names) {
    const imageId = basename(name, '.png')
    try {
      const { tensor, width, height } = readImageTensor(join(opts.imageDir, name))
      const resized = tf.image.resizeBilinear(tensor, [inH, inW])
      const cam = gradCam(model, resized as tf.Tensor4D, opts.layer, opts.classIndex)
      const raster = camToUint16(cam, width, height)
      tensor.dispose()
      resized.dispose()
      cam.dispose()
      const outPath = resolve(opts.outDir, `${imageId}_sal.png`)
      writeGray16(outPath, raster, width, height)
      rows.push({
        imageId,
        annotationPath: opts.annotationsPath ? resolve(opts.annotationsPath) : '',
        saliencyPath: outPath,
        maskPaths: [],
      })
    } catch (err) {
      console.error(`fail ${name}: ${(err as Error).message}`)
    }
  }
  writeManifest(rows, join(opts.outDir, 'manifest.csv'))
  return rows
}

async function main() {
  const { values } = parseArgs({
    options: {
      model: { type: 'string' },
      images: { type: 'string' },
      out: { type: 'string' },
      layer: { type: 'string' },
      annotations: { type: 'string' },
      'class-index': { type: 'string' },
    },
  })
  if (!values.model || !values.images || !values.out || !values.layer) {
    console.error(
      'usage: export-saliency --model <dir> --images <dir> --out <dir> --layer <name> [--annotations <path>] [--class-index <n>]',
    )
    process.exit(2)
  }
  const rows = await exportSaliency({
    modelDir: values.model,
    imageDir: values.images,
    outDir: values.out,
    layer: values.layer,
    annotationsPath: values.annotations,
    classIndex: values['class-index'] !== undefined ? Number(values['class-index']) : undefined,
  })
  console.log(`wrote ${rows.length} saliency raster(s) to ${values.out}`)
}

if (require.main === module) {
  main().catch(e => {
    console.error(e)
    process.exit(1)
  })
}
