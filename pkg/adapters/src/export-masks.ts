/** Export box-prompted segmentation masks.
 *
 * For every infected bounding box in the annotation file, the image is
 * cropped to the box, run through a tfjs segmentation checkpoint, and
 * the thresholded result is pasted back into a full-resolution binary
 * mask — one 8-bit 0/255 PNG per box. A manifest CSV lists the masks
 * per image so the evaluation harness can union them. Per-box failures
 * are logged, the mask is omitted, and the failure is flagged in the
 * manifest's companion failures file. */

import * as tf from '@tensorflow/tfjs'
import { mkdirSync } from 'fs'
import { join, resolve } from 'path'
import { parseArgs } from 'util'

import {
  Box,
  ManifestRow,
  atomicWriteSync,
  infectedBoxes,
  loadModelFromDir,
  readAnnotations,
  readImageTensor,
  writeGray8,
  writeManifest,
} from './io'

export interface MaskExportOptions {
  modelDir: string
  imageDir: string
  annotationsPath: string
  outDir: string
  threshold?: number
}

function segmentBox(
  model: tf.LayersModel,
  image: tf.Tensor4D,
  box: Box,
  inH: number,
  inW: number,
  threshold: number,
): Uint8Array {
  return tf.tidy(() => {
    const boxH = box.max_r - box.min_r + 1
    const boxW = box.max_c - box.min_c + 1
    const crop = tf.slice(image, [0, box.min_r, box.min_c, 0], [1, boxH, boxW, 3])
    const resized = tf.image.resizeBilinear(crop, [inH, inW])
    const probs = model.predict(resized) as tf.Tensor4D
    const back = tf.image.resizeBilinear(probs, [boxH, boxW])
    const data = back.dataSync()
    const out = new Uint8Array(boxH * boxW)
    for (let i = 0; i < out.length; i++) {
      out[i] = data[i] >= threshold ? 255 : 0
    }
    return out
  })
}

export async function exportMasks(opts: MaskExportOptions): Promise<ManifestRow[]> {
  const threshold = opts.threshold ?? 0.5
  const model = await loadModelFromDir(opts.modelDir)
  const shape = model.inputs[0].shape
  const [inH, inW] = [shape[1] as number, shape[2] as number]
  mkdirSync(opts.outDir, { recursive: true })

  const entries = readAnnotations(opts.annotationsPath)
  const rows: ManifestRow[] = []
  const failures: string[] = []
  for (const entry of entries) {
    const boxes = infectedBoxes(entry)
    if (boxes.length === 0) continue
    let image: tf.Tensor4D
    try {
      image = readImageTensor(join(opts.imageDir, `${entry.image}.png`)).tensor
    } catch (err) {
      console.error(`fail ${entry.image}: ${(err as Error).message}`)
      failures.push(`${entry.image},*,${(err as Error).message}`)
      continue
    }
    const maskPaths: string[] = []
    boxes.forEach((box, k) => {
      try {
        const boxMask = segmentBox(model, image, box, inH, inW, threshold)
        const full = new Uint8Array(entry.width * entry.height)
        const boxW = box.max_c - box.min_c + 1
        for (let r = box.min_r; r <= box.max_r; r++) {
          for (let c = box.min_c; c <= box.max_c; c++) {
            full[r * entry.width + c] = boxMask[(r - box.min_r) * boxW + (c - box.min_c)]
          }
        }
        const outPath = resolve(opts.outDir, `${entry.image}_box${k}.png`)
        writeGray8(outPath, full, entry.width, entry.height)
        maskPaths.push(outPath)
      } catch (err) {
        console.error(`fail ${entry.image} box ${k}: ${(err as Error).message}`)
        failures.push(`${entry.image},${k},${(err as Error).message}`)
      }
    })
    image.dispose()
    rows.push({
      imageId: entry.image,
      annotationPath: resolve(opts.annotationsPath),
      saliencyPath: '',
      maskPaths,
    })
  }
  writeManifest(rows, join(opts.outDir, 'manifest.csv'))
  if (failures.length > 0) {
    atomicWriteSync(
      join(opts.outDir, 'failures.csv'),
      Buffer.from('image_id,box_index,reason\n' + failures.join('\n') + '\n'),
    )
  }
  return rows
}

async function main() {
  const { values } = parseArgs({
    options: {
      model: { type: 'string' },
      images: { type: 'string' },
      annotations: { type: 'string' },
      out: { type: 'string' },
      threshold: { type: 'string' },
    },
  })
  if (!values.model || !values.images || !values.annotations || !values.out) {
    console.error(
      'usage: export-masks --model <dir> --images <dir> --annotations <path> --out <dir> [--threshold <t>]',
    )
    process.exit(2)
  }
  const rows = await exportMasks({
    modelDir: values.model,
    imageDir: values.images,
    annotationsPath: values.annotations,
    outDir: values.out,
    threshold: values.threshold !== undefined ? Number(values.threshold) : undefined,
  })
  const total = rows.reduce((n, r) => n + r.maskPaths.length, 0)
  console.log(`wrote ${total} mask(s) for ${rows.length} image(s) to ${values.out}`)
}

if (require.main === module) {
  main().catch(e => {
    console.error(e)
    process.exit(1)
  })
}
